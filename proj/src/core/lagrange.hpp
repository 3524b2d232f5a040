#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace hreig {

/// Where a Lagrange node sits on the triangle.
enum class NodeKind { Vertex, Edge, Interior };

struct LagrangeNode {
    std::array<int, 3> index;  // barycentric multi-index, sums to the degree
    NodeKind kind;
    int entity;  // local vertex or local edge (edge i is opposite vertex i); -1 for interior
};

/// Scalar value, gradient and Hessian (xx, xy, yy) of one basis function at one point.
struct ScalarJet {
    double value = 0.0;
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Vector3d hess = Eigen::Vector3d::Zero();
};

/// Equispaced nodal Lagrange basis of P_n on a triangle, evaluated through barycentric
/// coordinates so the same object serves every element.
class LagrangeBasis {
public:
    explicit LagrangeBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<LagrangeNode>& nodes() const { return nodes_; }
    const LagrangeNode& node(int a) const { return nodes_[a]; }

    /// Barycentric coordinates of node a.
    Eigen::Vector3d node_barycentric(int a) const;

    /// Index of the node with the given multi-index, or -1.
    int find(const std::array<int, 3>& index) const;

    /// Values at barycentric point `bary`.
    void values(const Eigen::Vector3d& bary, Eigen::Ref<Eigen::VectorXd> out) const;

    /// Values, gradients and Hessians; `grad_bary` row i is the gradient of barycentric i.
    void jets(const Eigen::Vector3d& bary, const Eigen::Matrix<double, 3, 2>& grad_bary,
              std::vector<ScalarJet>& out) const;

private:
    int degree_;
    std::vector<LagrangeNode> nodes_;
};

/// Number of polynomials of total degree <= n in two variables.
constexpr int poly_dim(int n) { return n < 0 ? 0 : (n + 1) * (n + 2) / 2; }

}  // namespace hreig
