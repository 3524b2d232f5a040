#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hreig {

using Point = Eigen::Vector2d;

/// Triangle with the newest vertex stored first: the refinement edge is (v[1], v[2]),
/// i.e. local edge 0. Vertices are counterclockwise.
struct Triangle {
    std::array<int, 3> v{};
    int parent = -1;      // triangle of the input mesh this one came from; -1 in an initial mesh
    int generation = 0;   // number of bisections since the initial mesh
    int root = 0;         // initial triangle this one descends from
    std::string lineage;  // bisection path below the root, one '0'/'1' per generation
};

/// Edge with endpoints sorted ascending. Local edge i of a triangle is opposite its vertex i.
/// Jumps across an interior edge are taken as (trace from tri[0]) - (trace from tri[1]).
struct Edge {
    std::array<int, 2> v{};
    std::array<int, 2> tri{-1, -1};
    std::array<int, 2> local{-1, -1};

    bool boundary() const { return tri[1] < 0; }
};

/// Metadata of a vertex created by bisecting an interior edge.
struct NewVertexRecord {
    int vertex = -1;
    std::array<int, 2> parent_edge{};  // endpoints of the bisected edge
    Point tangent = Point::Zero();     // unit, along the bisected edge
    Point normal = Point::Zero();      // tangent rotated by +90 degrees
    std::vector<int> plus_patch;       // triangles at the vertex with (mid(K) - x) . normal > 0
    std::vector<int> minus_patch;
};

class Mesh {
public:
    Mesh() = default;

    /// Builds edges, vertex adjacency and record patches; validates conformity and orientation.
    Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles, int initial_vertex_count,
         std::vector<NewVertexRecord> records = {});

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_boundary_edges() const;
    int initial_vertex_count() const { return initial_vertex_count_; }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NewVertexRecord>& records() const { return records_; }

    const Point& vertex(int i) const { return vertices_[i]; }
    const Triangle& triangle(int t) const { return triangles_[t]; }
    const Edge& edge(int e) const { return edges_[e]; }

    /// Global edge index of local edge `local` (opposite local vertex `local`) of triangle t.
    int edge_of(int t, int local) const { return tri_edges_[t][local]; }
    const std::vector<int>& triangles_at(int vertex) const { return vertex_triangles_[vertex]; }
    /// Record of a vertex created on an interior edge, or nullptr.
    const NewVertexRecord* record_at(int vertex) const;
    bool is_initial_vertex(int vertex) const { return vertex < initial_vertex_count_; }
    bool is_boundary_vertex(int vertex) const { return boundary_vertex_[vertex] != 0; }

    double area(int t) const;
    double total_area() const;
    Point barycenter(int t) const;
    /// Row i is the (constant) gradient of barycentric coordinate i.
    Eigen::Matrix<double, 3, 2> grad_barycentric(int t) const;
    Eigen::Vector3d barycentric(int t, const Point& x) const;
    Point point(int t, const Eigen::Vector3d& bary) const;
    /// Position of `vertex` within triangle t, or -1.
    int local_vertex(int t, int vertex) const;
    double edge_length(int e) const { return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).norm(); }
    /// Unit tangent from the lower to the higher endpoint index.
    Point edge_tangent(int e) const;
    /// Tangent rotated by +90 degrees.
    Point edge_normal(int e) const;
    double min_angle() const;

private:
    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<std::vector<int>> vertex_triangles_;
    std::vector<NewVertexRecord> records_;
    std::vector<int> record_index_;
    std::vector<char> boundary_vertex_;
    int initial_vertex_count_ = 0;
};

/// Parses the text format: "ntri nvert", nvert lines "x y", ntri lines "v0 v1 v2 refedge"
/// where refedge names the edge opposite that vertex position. '#' starts a comment.
Mesh parse_mesh(std::istream& in);
Mesh load_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
void save_mesh(const Mesh& mesh, const std::string& path);

/// Omega = (-1,1)^2 minus [0,1]^2 as three unit squares split along diagonals through the
/// re-entrant corner; every diagonal is the refinement edge of both halves.
Mesh initial_lshape();

/// Newest vertex bisection of the marked triangles plus conforming closure.
Mesh bisect(const Mesh& mesh, std::span<const int> marked);

/// Bisects every triangle once.
Mesh bisect_all(const Mesh& mesh);

/// True when every coarse triangle is a union of fine triangles (both from the same initial mesh).
bool is_refinement_of(const Mesh& fine, const Mesh& coarse);

/// For each fine triangle, the coarse triangle containing it. Throws if the meshes are not nested.
std::vector<int> coarse_ancestors(const Mesh& fine, const Mesh& coarse);

}  // namespace hreig
