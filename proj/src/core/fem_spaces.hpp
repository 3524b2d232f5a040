#pragma once

#include "lagrange.hpp"
#include "mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace hreig {

using Sym2 = Eigen::Matrix2d;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

enum class StressDofKind {
    Vertex,      // continuous vertex value component
    SplitPlus,   // t t^T component at a recorded vertex, supported on the plus patch
    SplitMinus,  // same, minus patch
    EdgeNormal,  // continuous normal-trace component at an edge node
    EdgeTangential,  // t t^T at an edge node, one element only (H(div) bubble)
    Interior,        // interior node component (H(div) bubble)
};

/// One local shape function on an element: scalar Lagrange function `node` times `matrix`.
struct LocalStressFunction {
    int dof;
    int node;
    Sym2 matrix;
};

/// Point-evaluation functional defining a global degree of freedom:
/// dof value = dual : tau(node of `element`), evaluated from inside `element`.
struct StressDofFunctional {
    StressDofKind kind;
    int element;
    int node;
    Sym2 dual;
};

/// Extended Hu-Zhang stress space: continuous symmetric P_k plus H(div) bubbles plus one-sided
/// t t^T vertex functions at vertices created on interior edges.
///
/// Global DOFs: 3 per unsplit vertex (canonical frame), 4 per recorded vertex (t t^T on each
/// patch, nu nu^T, t nu^T + nu t^T), 2 per edge node (normal-trace frame of the edge) and
/// 3 poly_dim(k-2) element-local bubble DOFs per triangle.
class StressSpace {
public:
    StressSpace(std::shared_ptr<const Mesh> mesh, int degree);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    int degree() const { return degree_; }
    int dim() const { return dim_; }
    int num_split_vertices() const { return num_split_; }
    /// Element-local bubble DOFs per triangle, verified against the trace-constraint nullspace.
    int bubble_dim() const { return 3 * poly_dim(degree_ - 2); }
    const LagrangeBasis& scalar_basis() const { return basis_; }

    std::span<const LocalStressFunction> local(int t) const {
        return {local_.data() + static_cast<std::size_t>(t) * per_element_, static_cast<std::size_t>(per_element_)};
    }
    int local_size() const { return per_element_; }
    const StressDofFunctional& functional(int dof) const { return functionals_[dof]; }
    /// First global DOF of each vertex / edge / element block.
    int vertex_offset(int v) const { return vertex_offset_[v]; }
    int edge_offset(int e) const { return edge_offset_[e]; }
    int element_offset(int t) const { return element_offset_[t]; }

    /// Orthonormal basis (columns) of the nullspace of the normal-trace constraints on
    /// P_k(K;S), in coefficients of local(t).
    Eigen::MatrixXd bubble_nullspace(int t) const;

private:
    void verify_bubbles(int t) const;

    std::shared_ptr<const Mesh> mesh_;
    int degree_;
    LagrangeBasis basis_;
    int per_element_ = 0;
    int dim_ = 0;
    int num_split_ = 0;
    std::vector<int> vertex_offset_;
    std::vector<int> edge_offset_;
    std::vector<int> element_offset_;
    std::vector<LocalStressFunction> local_;
    std::vector<StressDofFunctional> functionals_;
};

/// Discontinuous vector P_{k-1}: DOF t*2n + 2a + c is component c at Lagrange node a of triangle t.
class DisplacementSpace {
public:
    DisplacementSpace(std::shared_ptr<const Mesh> mesh, int degree_k);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    /// Polynomial degree of the displacements (k - 1).
    int poly_degree() const { return basis_.degree(); }
    int dim() const { return 2 * basis_.size() * mesh_->num_triangles(); }
    int local_size() const { return 2 * basis_.size(); }
    int offset(int t) const { return t * local_size(); }
    const LagrangeBasis& scalar_basis() const { return basis_; }

private:
    std::shared_ptr<const Mesh> mesh_;
    LagrangeBasis basis_;
};

/// Basis tables of one element at a set of points; index [p * nbasis + i].
struct StressBasisEval {
    int npoints = 0;
    int nbasis = 0;
    std::vector<Sym2> value;
    std::vector<Eigen::Vector2d> div;
    std::vector<Sym2> dx, dy, dxx, dxy, dyy;
};

struct DisplacementBasisEval {
    int npoints = 0;
    int nbasis = 0;
    std::vector<Eigen::Vector2d> value;
    std::vector<Sym2> sym_grad;
    std::vector<Eigen::Matrix2d> grad;
};

StressBasisEval eval_stress(const StressSpace& space, int element, std::span<const Eigen::Vector3d> points);
DisplacementBasisEval eval_displacement(const DisplacementSpace& space, int element, std::span<const Eigen::Vector3d> points);

/// Value and derivatives of a stress field at a point.
struct StressJet {
    Sym2 value = Sym2::Zero();
    Sym2 dx = Sym2::Zero(), dy = Sym2::Zero();
    Sym2 dxx = Sym2::Zero(), dxy = Sym2::Zero(), dyy = Sym2::Zero();

    Eigen::Vector2d div() const { return dx.col(0) + dy.col(1); }
};

struct DisplacementJet {
    Eigen::Vector2d value = Eigen::Vector2d::Zero();
    Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(i, j) = d u_i / d x_j

    Sym2 sym_grad() const { return 0.5 * (grad + grad.transpose()); }
};

StressJet stress_jet(const StressSpace& space, const Eigen::VectorXd& coeffs, int element, const Eigen::Vector3d& bary);
DisplacementJet displacement_jet(const DisplacementSpace& space, const Eigen::VectorXd& coeffs, int element,
                                 const Eigen::Vector3d& bary);

/// Stress field as a function of (element, physical point); elementwise so one-sided values are defined.
using PiecewiseStressField = std::function<Sym2(int element, const Point& x)>;
using PiecewiseVectorField = std::function<Eigen::Vector2d(int element, const Point& x)>;

/// Applies every DOF functional to the field.
Eigen::VectorXd interpolate_stress(const StressSpace& space, const PiecewiseStressField& field);
Eigen::VectorXd interpolate_displacement(const DisplacementSpace& space, const PiecewiseVectorField& field);

/// Fine-from-coarse coefficient map (fine dim x coarse dim). Throws if the meshes are not nested.
SparseMatrix prolongation_matrix(const StressSpace& coarse, const StressSpace& fine);
SparseMatrix prolongation_matrix(const DisplacementSpace& coarse, const DisplacementSpace& fine);

/// Coefficients on the fine space of the same function. Throws if the meshes are not nested.
Eigen::VectorXd prolong(const StressSpace& coarse, const StressSpace& fine, const Eigen::VectorXd& coeffs);
Eigen::VectorXd prolong(const DisplacementSpace& coarse, const DisplacementSpace& fine, const Eigen::VectorXd& coeffs);

}  // namespace hreig
