#include "fem_spaces.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>

namespace hreig {

namespace {

Sym2 outer_sym(const Point& a, const Point& b) {
    return a * b.transpose() + b * a.transpose();
}

const std::array<Sym2, 3>& canonical_frame() {
    static const std::array<Sym2, 3> frame{
        (Sym2() << 1, 0, 0, 0).finished(),
        (Sym2() << 0, 0, 0, 1).finished(),
        (Sym2() << 0, 1, 1, 0).finished(),
    };
    return frame;
}

// Dual of a frame matrix under the Frobenius product; all frames used are Frobenius-orthogonal.
Sym2 dual_of(const Sym2& m) { return m / m.squaredNorm(); }

double frob(const Sym2& a, const Sym2& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

StressSpace::StressSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree), basis_(std::max(degree, 0)) {
    if (degree < 3) fail(ErrorKind::InvalidArgument, "stress space requires polynomial degree k >= 3");
    const Mesh& m = *mesh_;
    const int k = degree_;
    per_element_ = 3 * basis_.size();

    int offset = 0;
    vertex_offset_.resize(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) {
        vertex_offset_[v] = offset;
        const bool split = m.record_at(v) != nullptr;
        num_split_ += split ? 1 : 0;
        offset += split ? 4 : 3;
    }
    edge_offset_.resize(m.num_edges());
    for (int e = 0; e < m.num_edges(); ++e) {
        edge_offset_[e] = offset;
        offset += 2 * (k - 1);
    }
    element_offset_.resize(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) {
        element_offset_[t] = offset;
        offset += bubble_dim();
    }
    dim_ = offset;

    functionals_.resize(dim_);
    std::vector<char> assigned(dim_, 0);
    local_.reserve(static_cast<std::size_t>(per_element_) * m.num_triangles());

    for (int t = 0; t < m.num_triangles(); ++t) {
        const Triangle& tri = m.triangle(t);
        const auto push = [&](int dof, int node, const Sym2& mat, StressDofKind kind) {
            local_.push_back({dof, node, mat});
            if (!assigned[dof]) {
                assigned[dof] = 1;
                functionals_[dof] = {kind, t, node, dual_of(mat)};
            }
        };
        int interior = 0;
        for (int a = 0; a < basis_.size(); ++a) {
            const LagrangeNode& node = basis_.node(a);
            switch (node.kind) {
                case NodeKind::Vertex: {
                    const int v = tri.v[node.entity];
                    const int base = vertex_offset_[v];
                    if (const NewVertexRecord* rec = m.record_at(v)) {
                        const bool plus = std::find(rec->plus_patch.begin(), rec->plus_patch.end(), t) != rec->plus_patch.end();
                        const Sym2 tt = rec->tangent * rec->tangent.transpose();
                        push(base + (plus ? 0 : 1), a, tt, plus ? StressDofKind::SplitPlus : StressDofKind::SplitMinus);
                        push(base + 2, a, rec->normal * rec->normal.transpose(), StressDofKind::Vertex);
                        push(base + 3, a, outer_sym(rec->tangent, rec->normal), StressDofKind::Vertex);
                    } else {
                        for (int c = 0; c < 3; ++c) push(base + c, a, canonical_frame()[c], StressDofKind::Vertex);
                    }
                    break;
                }
                case NodeKind::Edge: {
                    const int i = node.entity;
                    const int e = m.edge_of(t, i);
                    const int j_local = node.index[(i + 2) % 3];
                    const int j_global = tri.v[(i + 1) % 3] == m.edge(e).v[0] ? j_local : k - j_local;
                    const Point te = m.edge_tangent(e);
                    const Point ne = m.edge_normal(e);
                    const int base = edge_offset_[e] + 2 * (j_global - 1);
                    push(base, a, ne * ne.transpose(), StressDofKind::EdgeNormal);
                    push(base + 1, a, outer_sym(te, ne), StressDofKind::EdgeNormal);
                    push(element_offset_[t] + i * (k - 1) + j_local - 1, a, te * te.transpose(), StressDofKind::EdgeTangential);
                    break;
                }
                case NodeKind::Interior: {
                    const int base = element_offset_[t] + 3 * (k - 1) + 3 * interior;
                    for (int c = 0; c < 3; ++c) push(base + c, a, canonical_frame()[c], StressDofKind::Interior);
                    ++interior;
                    break;
                }
            }
        }
    }
    if (std::find(assigned.begin(), assigned.end(), 0) != assigned.end()) fail(ErrorKind::Numeric, "stress space: unassigned degree of freedom");
    for (int t = 0; t < m.num_triangles(); ++t) verify_bubbles(t);
}

namespace {

// Normal-trace constraints tau nu at k+1 equispaced points per edge, in local-function coefficients.
Eigen::MatrixXd trace_constraints(const StressSpace& space, int t) {
    const Mesh& m = space.mesh();
    const int k = space.degree();
    const auto local = space.local(t);
    const int n = static_cast<int>(local.size());
    Eigen::MatrixXd c(2 * 3 * (k + 1), n);
    Eigen::VectorXd phi(space.scalar_basis().size());
    int row = 0;
    for (int i = 0; i < 3; ++i) {
        const Point a = m.vertex(m.triangle(t).v[(i + 1) % 3]);
        const Point b = m.vertex(m.triangle(t).v[(i + 2) % 3]);
        const Point d = (b - a).normalized();
        const Point nu(d.y(), -d.x());
        for (int j = 0; j <= k; ++j) {
            Eigen::Vector3d bary = Eigen::Vector3d::Zero();
            bary((i + 1) % 3) = 1.0 - static_cast<double>(j) / k;
            bary((i + 2) % 3) = static_cast<double>(j) / k;
            space.scalar_basis().values(bary, phi);
            for (int f = 0; f < n; ++f) {
                const Eigen::Vector2d tn = phi(local[f].node) * (local[f].matrix * nu);
                c(row, f) = tn(0);
                c(row + 1, f) = tn(1);
            }
            row += 2;
        }
    }
    return c;
}

}  // namespace

void StressSpace::verify_bubbles(int t) const {
    const Eigen::MatrixXd c = trace_constraints(*this, t);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
    lu.setThreshold(1e-10);
    const int nullity = static_cast<int>(c.cols()) - static_cast<int>(lu.rank());
    if (nullity != bubble_dim()) {
        fail(ErrorKind::Numeric, "stress space: bubble nullspace dimension " + std::to_string(nullity) + " on element " +
                                     std::to_string(t) + ", expected " + std::to_string(bubble_dim()));
    }
    const double scale = c.cwiseAbs().maxCoeff();
    const auto local = this->local(t);
    for (int f = 0; f < static_cast<int>(local.size()); ++f) {
        if (local[f].dof < element_offset_[t]) continue;
        if (c.col(f).cwiseAbs().maxCoeff() > 1e-12 * scale) fail(ErrorKind::Numeric, "stress space: element-local function with nonzero normal trace");
    }
}

Eigen::MatrixXd StressSpace::bubble_nullspace(int t) const {
    const Eigen::MatrixXd c = trace_constraints(*this, t);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(bubble_dim());
}

DisplacementSpace::DisplacementSpace(std::shared_ptr<const Mesh> mesh, int degree_k)
    : mesh_(std::move(mesh)), basis_(std::max(degree_k - 1, 0)) {
    if (degree_k < 1) fail(ErrorKind::InvalidArgument, "displacement space requires k >= 1");
}

StressBasisEval eval_stress(const StressSpace& space, int element, std::span<const Eigen::Vector3d> points) {
    const auto local = space.local(element);
    const auto grad_bary = space.mesh().grad_barycentric(element);
    StressBasisEval out;
    out.npoints = static_cast<int>(points.size());
    out.nbasis = static_cast<int>(local.size());
    const std::size_t total = static_cast<std::size_t>(out.npoints) * out.nbasis;
    out.value.resize(total);
    out.div.resize(total);
    out.dx.resize(total);
    out.dy.resize(total);
    out.dxx.resize(total);
    out.dxy.resize(total);
    out.dyy.resize(total);
    std::vector<ScalarJet> jets;
    for (int p = 0; p < out.npoints; ++p) {
        space.scalar_basis().jets(points[p], grad_bary, jets);
        for (int i = 0; i < out.nbasis; ++i) {
            const ScalarJet& s = jets[local[i].node];
            const Sym2& mat = local[i].matrix;
            const std::size_t idx = static_cast<std::size_t>(p) * out.nbasis + i;
            out.value[idx] = s.value * mat;
            out.div[idx] = mat * s.grad;
            out.dx[idx] = s.grad(0) * mat;
            out.dy[idx] = s.grad(1) * mat;
            out.dxx[idx] = s.hess(0) * mat;
            out.dxy[idx] = s.hess(1) * mat;
            out.dyy[idx] = s.hess(2) * mat;
        }
    }
    return out;
}

DisplacementBasisEval eval_displacement(const DisplacementSpace& space, int element, std::span<const Eigen::Vector3d> points) {
    const auto grad_bary = space.mesh().grad_barycentric(element);
    const int n = space.scalar_basis().size();
    DisplacementBasisEval out;
    out.npoints = static_cast<int>(points.size());
    out.nbasis = 2 * n;
    const std::size_t total = static_cast<std::size_t>(out.npoints) * out.nbasis;
    out.value.resize(total);
    out.sym_grad.resize(total);
    out.grad.resize(total);
    std::vector<ScalarJet> jets;
    for (int p = 0; p < out.npoints; ++p) {
        space.scalar_basis().jets(points[p], grad_bary, jets);
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < 2; ++c) {
                const std::size_t idx = static_cast<std::size_t>(p) * out.nbasis + 2 * a + c;
                Eigen::Vector2d v = Eigen::Vector2d::Zero();
                v(c) = jets[a].value;
                Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
                g.row(c) = jets[a].grad.transpose();
                out.value[idx] = v;
                out.grad[idx] = g;
                out.sym_grad[idx] = 0.5 * (g + g.transpose());
            }
        }
    }
    return out;
}

StressJet stress_jet(const StressSpace& space, const Eigen::VectorXd& coeffs, int element, const Eigen::Vector3d& bary) {
    const auto local = space.local(element);
    std::vector<ScalarJet> jets;
    space.scalar_basis().jets(bary, space.mesh().grad_barycentric(element), jets);
    StressJet out;
    for (const LocalStressFunction& f : local) {
        const double c = coeffs(f.dof);
        if (c == 0.0) continue;
        const ScalarJet& s = jets[f.node];
        out.value += c * s.value * f.matrix;
        out.dx += c * s.grad(0) * f.matrix;
        out.dy += c * s.grad(1) * f.matrix;
        out.dxx += c * s.hess(0) * f.matrix;
        out.dxy += c * s.hess(1) * f.matrix;
        out.dyy += c * s.hess(2) * f.matrix;
    }
    return out;
}

DisplacementJet displacement_jet(const DisplacementSpace& space, const Eigen::VectorXd& coeffs, int element,
                                 const Eigen::Vector3d& bary) {
    std::vector<ScalarJet> jets;
    space.scalar_basis().jets(bary, space.mesh().grad_barycentric(element), jets);
    DisplacementJet out;
    const int base = space.offset(element);
    for (int a = 0; a < space.scalar_basis().size(); ++a) {
        for (int c = 0; c < 2; ++c) {
            const double coef = coeffs(base + 2 * a + c);
            out.value(c) += coef * jets[a].value;
            out.grad.row(c) += coef * jets[a].grad.transpose();
        }
    }
    return out;
}

namespace {

Sym2 stress_value(const StressSpace& space, const Eigen::VectorXd& coeffs, int element, const Eigen::Vector3d& bary) {
    Eigen::VectorXd phi(space.scalar_basis().size());
    space.scalar_basis().values(bary, phi);
    Sym2 out = Sym2::Zero();
    for (const LocalStressFunction& f : space.local(element)) out += coeffs(f.dof) * phi(f.node) * f.matrix;
    return out;
}

Eigen::Vector2d displacement_value(const DisplacementSpace& space, const Eigen::VectorXd& coeffs, int element,
                                   const Eigen::Vector3d& bary) {
    Eigen::VectorXd phi(space.scalar_basis().size());
    space.scalar_basis().values(bary, phi);
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    const int base = space.offset(element);
    for (int a = 0; a < phi.size(); ++a) out += phi(a) * coeffs.segment<2>(base + 2 * a);
    return out;
}

}  // namespace

Eigen::VectorXd interpolate_stress(const StressSpace& space, const PiecewiseStressField& field) {
    Eigen::VectorXd out(space.dim());
    for (int dof = 0; dof < space.dim(); ++dof) {
        const StressDofFunctional& f = space.functional(dof);
        const Point x = space.mesh().point(f.element, space.scalar_basis().node_barycentric(f.node));
        out(dof) = frob(f.dual, field(f.element, x));
    }
    return out;
}

Eigen::VectorXd interpolate_displacement(const DisplacementSpace& space, const PiecewiseVectorField& field) {
    Eigen::VectorXd out(space.dim());
    const int n = space.scalar_basis().size();
    for (int t = 0; t < space.mesh().num_triangles(); ++t) {
        for (int a = 0; a < n; ++a) {
            const Point x = space.mesh().point(t, space.scalar_basis().node_barycentric(a));
            out.segment<2>(space.offset(t) + 2 * a) = field(t, x);
        }
    }
    return out;
}

SparseMatrix prolongation_matrix(const StressSpace& coarse, const StressSpace& fine) {
    if (coarse.degree() != fine.degree()) fail(ErrorKind::InvalidArgument, "prolong: degree mismatch");
    const std::vector<int> parent = coarse_ancestors(fine.mesh(), coarse.mesh());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd phi(coarse.scalar_basis().size());
    for (int dof = 0; dof < fine.dim(); ++dof) {
        const StressDofFunctional& f = fine.functional(dof);
        const Point x = fine.mesh().point(f.element, fine.scalar_basis().node_barycentric(f.node));
        const int ct = parent[f.element];
        coarse.scalar_basis().values(coarse.mesh().barycentric(ct, x), phi);
        for (const LocalStressFunction& g : coarse.local(ct)) {
            const double v = phi(g.node) * frob(f.dual, g.matrix);
            if (v != 0.0) trip.emplace_back(dof, g.dof, v);
        }
    }
    SparseMatrix p(fine.dim(), coarse.dim());
    p.setFromTriplets(trip.begin(), trip.end());
    return p;
}

SparseMatrix prolongation_matrix(const DisplacementSpace& coarse, const DisplacementSpace& fine) {
    if (coarse.poly_degree() != fine.poly_degree()) fail(ErrorKind::InvalidArgument, "prolong: degree mismatch");
    const std::vector<int> parent = coarse_ancestors(fine.mesh(), coarse.mesh());
    const int n = coarse.scalar_basis().size();
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd phi(n);
    for (int t = 0; t < fine.mesh().num_triangles(); ++t) {
        const int ct = parent[t];
        for (int a = 0; a < n; ++a) {
            const Point x = fine.mesh().point(t, fine.scalar_basis().node_barycentric(a));
            coarse.scalar_basis().values(coarse.mesh().barycentric(ct, x), phi);
            for (int b = 0; b < n; ++b) {
                if (phi(b) == 0.0) continue;
                for (int c = 0; c < 2; ++c) trip.emplace_back(fine.offset(t) + 2 * a + c, coarse.offset(ct) + 2 * b + c, phi(b));
            }
        }
    }
    SparseMatrix p(fine.dim(), coarse.dim());
    p.setFromTriplets(trip.begin(), trip.end());
    return p;
}

Eigen::VectorXd prolong(const StressSpace& coarse, const StressSpace& fine, const Eigen::VectorXd& coeffs) {
    if (coarse.degree() != fine.degree()) fail(ErrorKind::InvalidArgument, "prolong: degree mismatch");
    const std::vector<int> parent = coarse_ancestors(fine.mesh(), coarse.mesh());
    return interpolate_stress(fine, [&](int element, const Point& x) {
        const int ct = parent[element];
        return stress_value(coarse, coeffs, ct, coarse.mesh().barycentric(ct, x));
    });
}

Eigen::VectorXd prolong(const DisplacementSpace& coarse, const DisplacementSpace& fine, const Eigen::VectorXd& coeffs) {
    if (coarse.poly_degree() != fine.poly_degree()) fail(ErrorKind::InvalidArgument, "prolong: degree mismatch");
    const std::vector<int> parent = coarse_ancestors(fine.mesh(), coarse.mesh());
    return interpolate_displacement(fine, [&](int element, const Point& x) {
        const int ct = parent[element];
        return displacement_value(coarse, coeffs, ct, coarse.mesh().barycentric(ct, x));
    });
}

}  // namespace hreig
