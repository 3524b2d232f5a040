#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hreig {

/// Quadrature on [0,1].
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;  // sum to 1

    int size() const { return static_cast<int>(weights.size()); }
};

/// Quadrature on a triangle in barycentric coordinates; weights sum to 1 and
/// are scaled by the element area at use sites.
struct TriangleRule {
    std::vector<Eigen::Vector3d> points;
    std::vector<double> weights;
    int degree = 0;

    int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre rule with n points (exact to degree 2n-1).
LineRule gauss_legendre(int n);

/// Gauss-Legendre rule exact for polynomials of the given degree.
LineRule line_rule(int degree);

/// Collapsed (Duffy) Gauss product rule exact for polynomials of the given degree.
TriangleRule triangle_rule(int degree);

}  // namespace hreig
