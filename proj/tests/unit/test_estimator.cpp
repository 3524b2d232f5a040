#include "doctest.h"

#include "error.hpp"
#include "estimator.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

using namespace hreig;

namespace {

struct Pair {
    std::shared_ptr<const Mesh> mesh;
    StressSpace sigma_space;
    DisplacementSpace u_space;
    Eigen::VectorXd sigma;
    Eigen::VectorXd u;

    Pair(Mesh m, int k) : mesh(std::make_shared<const Mesh>(std::move(m))), sigma_space(mesh, k), u_space(mesh, k) {}
};

/// sigma = C eps(u) for mu = lame = 1, so that A sigma = eps(u) with ComplianceModel::elasticity(1, 1).
Sym2 elastic_stress(const Eigen::Matrix2d& grad) {
    const Sym2 eps = 0.5 * (grad + grad.transpose());
    return 2.0 * eps + eps.trace() * Sym2::Identity();
}

/// u = b (1, -1/2) with the cubic bubble b = x y (1 - x - y) of the reference triangle.
Pair bubble_pair(const Mesh& m) {
    Pair p(m, 4);
    const auto u = [](int, const Point& x) {
        const double b = x.x() * x.y() * (1.0 - x.x() - x.y());
        return Eigen::Vector2d(b, -0.5 * b);
    };
    const auto grad = [](const Point& x) {
        const double bx = x.y() * (1.0 - 2.0 * x.x() - x.y());
        const double by = x.x() * (1.0 - x.x() - 2.0 * x.y());
        Eigen::Matrix2d g;
        g << bx, by, -0.5 * bx, -0.5 * by;
        return g;
    };
    p.u = interpolate_displacement(p.u_space, u);
    p.sigma = interpolate_stress(p.sigma_space, [&](int, const Point& x) { return elastic_stress(grad(x)); });
    return p;
}

/// Smooth pair on the unit square with u = sin(pi x) sin(pi y) (1, 2).
Pair smooth_pair(const Mesh& m, int k) {
    using std::numbers::pi;
    Pair p(m, k);
    p.u = interpolate_displacement(p.u_space, [](int, const Point& x) {
        const double s = std::sin(pi * x.x()) * std::sin(pi * x.y());
        return Eigen::Vector2d(s, 2.0 * s);
    });
    p.sigma = interpolate_stress(p.sigma_space, [](int, const Point& x) {
        const double sx = pi * std::cos(pi * x.x()) * std::sin(pi * x.y());
        const double sy = pi * std::sin(pi * x.x()) * std::cos(pi * x.y());
        Eigen::Matrix2d g;
        g << sx, sy, 2.0 * sx, 2.0 * sy;
        return elastic_stress(g);
    });
    return p;
}

Mesh uniform(Mesh m, int times) {
    for (int i = 0; i < times; ++i) m = bisect_all(m);
    return m;
}

}  // namespace

TEST_CASE("estimator vanishes for an exact discrete pair") {
    const auto model = ComplianceModel::elasticity(1.0, 1.0);
    for (std::uint64_t seed : {1, 2, 3}) {
        const Pair p = bubble_pair(test::random_refinement(test::reference_triangle(), 4, 0.5, seed));
        const EstimatorReport r = eta_local_all(p.sigma_space, p.u_space, model, p.sigma, p.u);
        const double scale = p.sigma.squaredNorm() / p.sigma.size();
        CHECK(eta_global(r) < 1e-20 * scale);
        for (const auto& e : r.elements) {
            CHECK(e.curlcurl < 1e-22 * scale);
            CHECK(e.edge < 1e-22 * scale);
            CHECK(e.sym < 1e-22 * scale);
            CHECK(e.jump < 1e-22 * scale);
        }
    }
}

TEST_CASE("constant stress with zero displacement") {
    const auto model = ComplianceModel::elasticity(1.0, 0.5);
    Pair p(uniform(initial_lshape(), 2), 3);
    Sym2 c;
    c << 1.0, 0.3, 0.3, -2.0;
    p.sigma = interpolate_stress(p.sigma_space, [&](int, const Point&) { return c; });
    p.u = Eigen::VectorXd::Zero(p.u_space.dim());
    const EstimatorReport r = eta_local_all(p.sigma_space, p.u_space, model, p.sigma, p.u);
    const Sym2 ac = model.apply(c);
    for (const auto& e : r.elements) {
        const double area = p.mesh->area(e.element);
        CHECK(e.curlcurl == doctest::Approx(0.0).scale(1e-20));
        CHECK(e.jump == doctest::Approx(0.0).scale(1e-20));
        CHECK(e.sym == doctest::Approx(area * area * ac.squaredNorm()).epsilon(1e-12));
        // only boundary edges contribute, each with |e| ((A c) t . t)^2 h
        double expected = 0.0;
        for (int i = 0; i < 3; ++i) {
            const int id = p.mesh->edge_of(e.element, i);
            if (!p.mesh->edge(id).boundary()) continue;
            const Point t = p.mesh->edge_tangent(id);
            const double j1 = t.dot(ac * t);
            expected += std::sqrt(area) * p.mesh->edge_length(id) * j1 * j1;
        }
        CHECK(std::abs(e.edge - expected) <= 1e-12 * expected + 1e-24);
    }
}

TEST_CASE("estimator is additive and local") {
    const auto model = ComplianceModel::stokes(1.0);
    Pair p(test::random_refinement(initial_lshape(), 3, 0.4, 5), 3);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> d;
    p.sigma = Eigen::VectorXd::NullaryExpr(p.sigma_space.dim(), [&] { return d(rng); });
    p.u = Eigen::VectorXd::NullaryExpr(p.u_space.dim(), [&] { return d(rng); });
    const EstimatorReport r = eta_local_all(p.sigma_space, p.u_space, model, p.sigma, p.u);
    const auto totals = r.totals();
    double sum = 0.0;
    for (double v : totals) sum += v;
    CHECK(eta_global(r) == sum);
    std::vector<int> all(totals.size());
    std::iota(all.begin(), all.end(), 0);
    CHECK(eta_subset(r, all) == sum);
    std::vector<int> half(all.begin(), all.begin() + all.size() / 2);
    std::vector<int> rest(all.begin() + all.size() / 2, all.end());
    CHECK(eta_subset(r, half) + eta_subset(r, rest) == doctest::Approx(sum).epsilon(1e-14));
    for (int t = 0; t < p.mesh->num_triangles(); t += 5) {
        const ElementIndicator one = eta_local(p.sigma_space, p.u_space, model, p.sigma, p.u, t);
        CHECK(one.total() == doctest::Approx(r.elements[t].total()).epsilon(1e-14));
    }
    const int bad[] = {-1};
    CHECK_THROWS_AS(eta_subset(r, bad), Error);
    const EstimatorReport threaded = eta_local_all(p.sigma_space, p.u_space, model, p.sigma, p.u, 3);
    CHECK(threaded.totals() == totals);

    std::ostringstream csv;
    write_estimator_csv(r, csv);
    CHECK(csv.str().rfind("element,curlcurl,edge,sym,jump,total\n", 0) == 0);
}

TEST_CASE("estimator of an interpolated smooth pair decays like h^k") {
    const auto model = ComplianceModel::elasticity(1.0, 1.0);
    std::vector<double> eta, h;
    // residual terms of an interpolant decay one order faster, so the rate settles late
    for (int level = 4; level <= 10; level += 2) {
        const Pair p = smooth_pair(uniform(test::unit_square(), level), 3);
        eta.push_back(std::sqrt(eta_global(eta_local_all(p.sigma_space, p.u_space, model, p.sigma, p.u))));
        h.push_back(std::sqrt(p.mesh->area(0)));
    }
    for (std::size_t i = 1; i < eta.size(); ++i) {
        const double rate = std::log(eta[i] / eta[i - 1]) / std::log(h[i] / h[i - 1]);
        CHECK(rate > 2.7);
        if (i + 1 == eta.size()) CHECK(rate == doctest::Approx(3.0).epsilon(0.1));
    }
}

TEST_CASE("matrix curl conventions") {
    // M = [[y^2, 0], [0, x^2]]: curl curl M = 2 + 2
    Sym2 dxx = Sym2::Zero(), dxy = Sym2::Zero(), dyy = Sym2::Zero();
    dyy(0, 0) = 2.0;
    dxx(1, 1) = 2.0;
    CHECK(curl_curl(dxx, dxy, dyy) == doctest::Approx(4.0));
    // M = [[0, x], [x, 0]]: curl M = (d1 M12 - d2 M11, d1 M22 - d2 M12) = (1, 0)
    Sym2 dx = Sym2::Zero(), dy = Sym2::Zero();
    dx(0, 1) = dx(1, 0) = 1.0;
    CHECK(curl(dx, dy).isApprox(Eigen::Vector2d(1.0, 0.0)));
}
