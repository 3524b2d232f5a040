#include "mesh.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace hreig {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

Point rotate90(const Point& t) { return Point(-t.y(), t.x()); }

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles, int initial_vertex_count,
           std::vector<NewVertexRecord> records)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      records_(std::move(records)),
      initial_vertex_count_(initial_vertex_count) {
    const int nv = num_vertices();
    const int nt = num_triangles();

    for (int t = 0; t < nt; ++t) {
        const auto& v = triangles_[t].v;
        for (int i = 0; i < 3; ++i) {
            if (v[i] < 0 || v[i] >= nv) fail(ErrorKind::Mesh, "triangle " + std::to_string(t) + ": vertex index out of range");
        }
        if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) fail(ErrorKind::Mesh, "triangle " + std::to_string(t) + " is degenerate");
        const double a = signed_area(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]);
        if (a == 0.0) fail(ErrorKind::Mesh, "triangle " + std::to_string(t) + " is degenerate (zero area)");
        if (a < 0.0) fail(ErrorKind::Mesh, "triangle " + std::to_string(t) + " is not counterclockwise");
    }

    struct HalfEdge {
        std::uint64_t key;
        int tri;
        int local;
    };
    std::vector<HalfEdge> half;
    half.reserve(3 * nt);
    for (int t = 0; t < nt; ++t) {
        const auto& v = triangles_[t].v;
        for (int i = 0; i < 3; ++i) half.push_back({edge_key(v[(i + 1) % 3], v[(i + 2) % 3]), t, i});
    }
    std::stable_sort(half.begin(), half.end(), [](const HalfEdge& x, const HalfEdge& y) { return x.key < y.key; });

    tri_edges_.assign(nt, {-1, -1, -1});
    for (std::size_t i = 0; i < half.size();) {
        std::size_t j = i;
        while (j < half.size() && half[j].key == half[i].key) ++j;
        if (j - i > 2) fail(ErrorKind::Mesh, "non-conforming mesh: edge shared by more than two triangles");
        Edge e;
        e.v = {static_cast<int>(half[i].key >> 32), static_cast<int>(half[i].key & 0xffffffffu)};
        const int id = static_cast<int>(edges_.size());
        for (std::size_t s = i; s < j; ++s) {
            e.tri[s - i] = half[s].tri;
            e.local[s - i] = half[s].local;
            tri_edges_[half[s].tri][half[s].local] = id;
        }
        if (j - i == 2) {
            // Properly matched neighbours traverse the shared edge in opposite directions.
            const auto& t0 = triangles_[e.tri[0]].v;
            const auto& t1 = triangles_[e.tri[1]].v;
            const int a0 = t0[(e.local[0] + 1) % 3];
            const int a1 = t1[(e.local[1] + 1) % 3];
            if (a0 == a1) fail(ErrorKind::Mesh, "non-conforming mesh: overlapping or duplicated triangles");
        }
        edges_.push_back(e);
        i = j;
    }

    vertex_triangles_.assign(nv, {});
    for (int t = 0; t < nt; ++t) {
        for (int vi : triangles_[t].v) vertex_triangles_[vi].push_back(t);
    }
    boundary_vertex_.assign(nv, 0);
    for (const Edge& e : edges_) {
        if (e.boundary()) boundary_vertex_[e.v[0]] = boundary_vertex_[e.v[1]] = 1;
    }

    record_index_.assign(nv, -1);
    for (std::size_t r = 0; r < records_.size(); ++r) {
        NewVertexRecord& rec = records_[r];
        if (rec.vertex < 0 || rec.vertex >= nv) fail(ErrorKind::Mesh, "vertex record out of range");
        record_index_[rec.vertex] = static_cast<int>(r);
        rec.plus_patch.clear();
        rec.minus_patch.clear();
        const Point& x = vertices_[rec.vertex];
        for (int t : vertex_triangles_[rec.vertex]) {
            const double side = (barycenter(t) - x).dot(rec.normal);
            if (side > 0.0) {
                rec.plus_patch.push_back(t);
            } else if (side < 0.0) {
                rec.minus_patch.push_back(t);
            } else {
                fail(ErrorKind::Mesh, "vertex record: barycenter on the splitting line");
            }
        }
    }
}

int Mesh::num_boundary_edges() const {
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.boundary(); }));
}

const NewVertexRecord* Mesh::record_at(int vertex) const {
    const int r = record_index_[vertex];
    return r < 0 ? nullptr : &records_[r];
}

double Mesh::area(int t) const {
    const auto& v = triangles_[t].v;
    return signed_area(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]);
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < num_triangles(); ++t) s += area(t);
    return s;
}

Point Mesh::barycenter(int t) const {
    const auto& v = triangles_[t].v;
    return (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]]) / 3.0;
}

Eigen::Matrix<double, 3, 2> Mesh::grad_barycentric(int t) const {
    const auto& v = triangles_[t].v;
    const double two_area = 2.0 * area(t);
    Eigen::Matrix<double, 3, 2> g;
    for (int i = 0; i < 3; ++i) {
        const Point& p = vertices_[v[(i + 1) % 3]];
        const Point& q = vertices_[v[(i + 2) % 3]];
        g(i, 0) = (p.y() - q.y()) / two_area;
        g(i, 1) = (q.x() - p.x()) / two_area;
    }
    return g;
}

Eigen::Vector3d Mesh::barycentric(int t, const Point& x) const {
    const auto& v = triangles_[t].v;
    const double a = area(t);
    Eigen::Vector3d b;
    for (int i = 0; i < 3; ++i) b(i) = signed_area(x, vertices_[v[(i + 1) % 3]], vertices_[v[(i + 2) % 3]]) / a;
    return b;
}

Point Mesh::point(int t, const Eigen::Vector3d& bary) const {
    const auto& v = triangles_[t].v;
    return bary(0) * vertices_[v[0]] + bary(1) * vertices_[v[1]] + bary(2) * vertices_[v[2]];
}

int Mesh::local_vertex(int t, int vertex) const {
    const auto& v = triangles_[t].v;
    for (int i = 0; i < 3; ++i) {
        if (v[i] == vertex) return i;
    }
    return -1;
}

Point Mesh::edge_tangent(int e) const {
    const Point d = vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]];
    return d / d.norm();
}

Point Mesh::edge_normal(int e) const { return rotate90(edge_tangent(e)); }

double Mesh::min_angle() const {
    double best = std::numbers::pi;
    for (const Triangle& tri : triangles_) {
        for (int i = 0; i < 3; ++i) {
            const Point a = vertices_[tri.v[(i + 1) % 3]] - vertices_[tri.v[i]];
            const Point b = vertices_[tri.v[(i + 2) % 3]] - vertices_[tri.v[i]];
            best = std::min(best, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)));
        }
    }
    return best;
}

// ---------------------------------------------------------------------------------------------
// Text format

namespace {

std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

void check_matching_condition(const Mesh& mesh) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Edge& e = mesh.edge(mesh.edge_of(t, 0));
        if (e.boundary()) continue;
        const int other = e.tri[0] == t ? e.tri[1] : e.tri[0];
        if (mesh.edge_of(other, 0) != mesh.edge_of(t, 0)) {
            fail(ErrorKind::Mesh, "refinement-edge labeling violates the matching condition at triangle " + std::to_string(t) +
                                      " (its refinement edge is not the refinement edge of triangle " + std::to_string(other) + ")");
        }
    }
}

void check_hanging_nodes(const Mesh& mesh) {
    for (const Edge& e : mesh.edges()) {
        if (!e.boundary()) continue;
        const Point& a = mesh.vertex(e.v[0]);
        const Point& b = mesh.vertex(e.v[1]);
        const Point d = b - a;
        const double len2 = d.squaredNorm();
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            if (v == e.v[0] || v == e.v[1]) continue;
            const Point p = mesh.vertex(v) - a;
            const double s = p.dot(d) / len2;
            const double cross = std::abs(p.x() * d.y() - p.y() * d.x());
            if (s > 0.0 && s < 1.0 && cross <= 1e-12 * len2) fail(ErrorKind::Mesh, "non-conforming mesh: hanging node " + std::to_string(v));
        }
    }
}

}  // namespace

Mesh parse_mesh(std::istream& in) {
    std::stringstream tokens;
    std::string line;
    while (std::getline(in, line)) tokens << strip_comment(line) << '\n';

    long ntri = -1;
    long nvert = -1;
    if (!(tokens >> ntri >> nvert) || ntri < 1 || nvert < 3) fail(ErrorKind::Parse, "mesh: bad header (expected \"ntri nvert\")");
    std::vector<Point> vertices(nvert);
    for (long i = 0; i < nvert; ++i) {
        double x = 0.0;
        double y = 0.0;
        if (!(tokens >> x >> y)) fail(ErrorKind::Parse, "mesh: expected coordinates of vertex " + std::to_string(i));
        vertices[i] = Point(x, y);
    }
    std::vector<Triangle> triangles(ntri);
    for (long t = 0; t < ntri; ++t) {
        long a = 0;
        long b = 0;
        long c = 0;
        long ref = 0;
        if (!(tokens >> a >> b >> c >> ref)) fail(ErrorKind::Parse, "mesh: expected \"v0 v1 v2 refedge\" for triangle " + std::to_string(t));
        if (ref < 0 || ref > 2) fail(ErrorKind::Parse, "mesh: refedge must be 0, 1 or 2 (triangle " + std::to_string(t) + ")");
        for (long v : {a, b, c}) {
            if (v < 0 || v >= nvert) fail(ErrorKind::Parse, "mesh: vertex index out of range in triangle " + std::to_string(t));
        }
        const std::array<int, 3> raw{static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
        Triangle& tri = triangles[t];
        for (int i = 0; i < 3; ++i) tri.v[i] = raw[(ref + i) % 3];
        tri.root = static_cast<int>(t);
    }
    std::string extra;
    if (tokens >> extra) fail(ErrorKind::Parse, "mesh: trailing content \"" + extra + "\"");

    std::vector<std::array<int, 3>> sorted;
    for (const Triangle& tri : triangles) {
        auto s = tri.v;
        std::sort(s.begin(), s.end());
        sorted.push_back(s);
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail(ErrorKind::Mesh, "non-conforming mesh: duplicated triangle");

    Mesh mesh(std::move(vertices), std::move(triangles), static_cast<int>(nvert));
    check_hanging_nodes(mesh);
    check_matching_condition(mesh);
    return mesh;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open mesh file " + path);
    return parse_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << mesh.num_triangles() << ' ' << mesh.num_vertices() << '\n';
    out << std::setprecision(17);
    for (const Point& p : mesh.vertices()) out << p.x() << ' ' << p.y() << '\n';
    for (const Triangle& t : mesh.triangles()) out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << " 0\n";
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write mesh file " + path);
    write_mesh(mesh, out);
}

Mesh initial_lshape() {
    std::vector<Point> vertices{{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}};
    const std::array<std::array<int, 3>, 6> tris{{{1, 4, 0}, {3, 0, 4}, {1, 2, 4}, {5, 4, 2}, {3, 4, 6}, {7, 6, 4}}};
    std::vector<Triangle> triangles;
    for (int t = 0; t < 6; ++t) {
        Triangle tri;
        tri.v = tris[t];
        tri.root = t;
        triangles.push_back(tri);
    }
    return Mesh(std::move(vertices), std::move(triangles), 8);
}

// ---------------------------------------------------------------------------------------------
// Newest vertex bisection

Mesh bisect(const Mesh& mesh, std::span<const int> marked) {
    const int ne = mesh.num_edges();
    std::vector<char> edge_marked(ne, 0);
    std::vector<int> work;
    for (int t : marked) {
        if (t < 0 || t >= mesh.num_triangles()) fail(ErrorKind::InvalidArgument, "bisect: triangle index out of range");
        const int e = mesh.edge_of(t, 0);
        if (!edge_marked[e]) {
            edge_marked[e] = 1;
            work.push_back(e);
        }
    }
    // Closure: a triangle with any marked edge must have its refinement edge marked.
    while (!work.empty()) {
        const int e = work.back();
        work.pop_back();
        for (int t : mesh.edge(e).tri) {
            if (t < 0) continue;
            const int r = mesh.edge_of(t, 0);
            if (!edge_marked[r]) {
                edge_marked[r] = 1;
                work.push_back(r);
            }
        }
    }

    std::vector<Point> vertices = mesh.vertices();
    std::vector<NewVertexRecord> records = mesh.records();
    std::unordered_map<std::uint64_t, int> midpoint;
    for (int e = 0; e < ne; ++e) {
        if (!edge_marked[e]) continue;
        const Edge& edge = mesh.edge(e);
        const Point& a = mesh.vertex(edge.v[0]);
        const Point& b = mesh.vertex(edge.v[1]);
        const int m = static_cast<int>(vertices.size());
        vertices.push_back(0.5 * (a + b));
        midpoint.emplace(edge_key(edge.v[0], edge.v[1]), m);
        if (!edge.boundary()) {
            NewVertexRecord rec;
            rec.vertex = m;
            rec.parent_edge = edge.v;
            rec.tangent = (b - a).normalized();
            rec.normal = rotate90(rec.tangent);
            records.push_back(std::move(rec));
        }
    }

    std::vector<Triangle> out;
    out.reserve(mesh.num_triangles() + 2 * midpoint.size());
    // Children of (v0; v1 v2) split at the midpoint m of v1v2 are (m, v2, v0) and (m, v0, v1);
    // their refinement edges are the parent's other two edges.
    auto refine = [&](auto&& self, const Triangle& tri) -> void {
        const auto it = midpoint.find(edge_key(tri.v[1], tri.v[2]));
        if (it == midpoint.end()) {
            out.push_back(tri);
            return;
        }
        const int m = it->second;
        Triangle c0 = tri;
        Triangle c1 = tri;
        c0.v = {m, tri.v[2], tri.v[0]};
        c1.v = {m, tri.v[0], tri.v[1]};
        c0.generation = c1.generation = tri.generation + 1;
        c0.lineage += '0';
        c1.lineage += '1';
        self(self, c0);
        self(self, c1);
    };
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        Triangle tri = mesh.triangle(t);
        tri.parent = t;
        refine(refine, tri);
    }
    return Mesh(std::move(vertices), std::move(out), mesh.initial_vertex_count(), std::move(records));
}

Mesh bisect_all(const Mesh& mesh) {
    std::vector<int> all(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) all[t] = t;
    return bisect(mesh, all);
}

namespace {

bool same_initial_mesh(const Mesh& a, const Mesh& b) {
    if (a.initial_vertex_count() != b.initial_vertex_count()) return false;
    for (int v = 0; v < a.initial_vertex_count(); ++v) {
        if (a.vertex(v) != b.vertex(v)) return false;
    }
    int roots_a = 0;
    int roots_b = 0;
    for (const Triangle& t : a.triangles()) roots_a = std::max(roots_a, t.root + 1);
    for (const Triangle& t : b.triangles()) roots_b = std::max(roots_b, t.root + 1);
    return roots_a == roots_b;
}

std::vector<int> ancestors_or_empty(const Mesh& fine, const Mesh& coarse) {
    if (!same_initial_mesh(fine, coarse)) return {};
    std::map<std::pair<int, std::string>, int> index;
    for (int t = 0; t < coarse.num_triangles(); ++t) index.emplace(std::make_pair(coarse.triangle(t).root, coarse.triangle(t).lineage), t);
    std::vector<int> result(fine.num_triangles(), -1);
    for (int t = 0; t < fine.num_triangles(); ++t) {
        const Triangle& tri = fine.triangle(t);
        for (std::size_t len = tri.lineage.size() + 1; len-- > 0;) {
            const auto it = index.find(std::make_pair(tri.root, tri.lineage.substr(0, len)));
            if (it != index.end()) {
                result[t] = it->second;
                break;
            }
        }
        if (result[t] < 0) return {};
    }
    return result;
}

}  // namespace

bool is_refinement_of(const Mesh& fine, const Mesh& coarse) {
    return !ancestors_or_empty(fine, coarse).empty() || (fine.num_triangles() == 0 && coarse.num_triangles() == 0);
}

std::vector<int> coarse_ancestors(const Mesh& fine, const Mesh& coarse) {
    auto result = ancestors_or_empty(fine, coarse);
    if (result.empty()) fail(ErrorKind::InvalidArgument, "meshes are not nested");
    return result;
}

}  // namespace hreig
