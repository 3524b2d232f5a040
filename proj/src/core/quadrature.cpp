#include "quadrature.hpp"

#include "error.hpp"

#include <cmath>

namespace hreig {

LineRule gauss_legendre(int n) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "gauss_legendre: need at least one point");
    // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre recurrence.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = eig.eigenvalues()(i);
        const double v = eig.eigenvectors()(0, i);
        rule.points[i] = 0.5 * (x + 1.0);
        rule.weights[i] = v * v;  // 2 v^2 on [-1,1], halved for [0,1]
    }
    // Symmetrize to remove eigen-solver noise.
    for (int i = 0; i < n / 2; ++i) {
        const int j = n - 1 - i;
        const double x = 0.5 * (rule.points[i] + (1.0 - rule.points[j]));
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.points[i] = x;
        rule.points[j] = 1.0 - x;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.5;
    return rule;
}

LineRule line_rule(int degree) { return gauss_legendre(degree / 2 + 1); }

TriangleRule triangle_rule(int degree) {
    if (degree < 0) fail(ErrorKind::InvalidArgument, "triangle_rule: negative degree");
    // The collapse map adds one degree in the first direction through its Jacobian.
    const int n = (degree + 2) / 2 + ((degree + 2) % 2);
    const LineRule g = gauss_legendre(n);
    TriangleRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        const double xi = g.points[i];
        for (int j = 0; j < n; ++j) {
            const double eta = g.points[j];
            const double x = xi;
            const double y = eta * (1.0 - xi);
            rule.points.emplace_back(1.0 - x - y, x, y);
            rule.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - xi));
        }
    }
    return rule;
}

}  // namespace hreig
