#include "doctest.h"

#include "quadrature.hpp"

#include <cmath>

using namespace hreig;

namespace {

// integral over the reference triangle of x^a y^b = a! b! / (a + b + 2)!
double monomial_integral(int a, int b) {
    return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials up to 2n-1") {
    for (int n = 1; n <= 8; ++n) {
        const LineRule r = gauss_legendre(n);
        CHECK(r.size() == n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], p);
            CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
        }
    }
}

TEST_CASE("line rule is symmetric") {
    const LineRule r = line_rule(9);
    for (int i = 0; i < r.size(); ++i) {
        CHECK(r.points[i] + r.points[r.size() - 1 - i] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.weights[i] == doctest::Approx(r.weights[r.size() - 1 - i]).epsilon(1e-15));
    }
}

TEST_CASE("triangle rule is exact up to its degree") {
    for (int deg = 0; deg <= 14; ++deg) {
        const TriangleRule r = triangle_rule(deg);
        CHECK(r.degree >= deg);
        double wsum = 0.0;
        for (int q = 0; q < r.size(); ++q) {
            wsum += r.weights[q];
            CHECK(r.points[q].sum() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(r.points[q].minCoeff() > 0.0);
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b) {
                double s = 0.0;
                for (int q = 0; q < r.size(); ++q)
                    s += 0.5 * r.weights[q] * std::pow(r.points[q](1), a) * std::pow(r.points[q](2), b);
                CHECK(s == doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
            }
    }
}
