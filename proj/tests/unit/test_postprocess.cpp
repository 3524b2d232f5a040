#include "doctest.h"

#include "eigensolver.hpp"
#include "error.hpp"
#include "postprocess.hpp"
#include "support.hpp"

using namespace hreig;

namespace {

struct Level {
    std::shared_ptr<const Mesh> mesh;
    StressSpace sigma;
    DisplacementSpace u;
    BlockSystem sys;
    EigenPair pair;

    Level(Mesh m, const ComplianceModel& model)
        : mesh(std::make_shared<const Mesh>(std::move(m))), sigma(mesh, 3), u(mesh, 3), sys(assemble(sigma, u, model)),
          pair(solve_eigen(sys, {})[0]) {}
};

Mesh lshape(int levels) {
    Mesh m = initial_lshape();
    for (int i = 0; i < levels; ++i) m = bisect_all(m);
    return m;
}

}  // namespace

TEST_CASE("a compatible pair is reconstructed exactly") {
    // sigma = C eps(w) with w quadratic, u_h = w: the minimizer is w itself
    const auto model = ComplianceModel::elasticity(1.0, 1.0);
    auto mesh = std::make_shared<const Mesh>(test::random_refinement(initial_lshape(), 2, 0.5, 9));
    const StressSpace s(mesh, 3);
    const DisplacementSpace u(mesh, 3);
    auto w = [](const Point& x) { return Eigen::Vector2d(x.x() * x.y() + 0.5 * x.y() * x.y(), x.x() * x.x() - x.y()); };
    const Eigen::VectorXd sigma = interpolate_stress(s, [](int, const Point& x) {
        Eigen::Matrix2d g;
        g << x.y(), x.x() + x.y(), 2.0 * x.x(), -1.0;
        const Sym2 e = 0.5 * (g + g.transpose());
        return Sym2(2.0 * e + e.trace() * Sym2::Identity());
    });
    const Eigen::VectorXd uh = interpolate_displacement(u, [&](int, const Point& x) { return w(x); });
    const ReconstructedField star = reconstruct(s, u, model, sigma, uh, 4);
    CHECK(star.degree() == 4);
    CHECK(star.max_local_residual < 1e-10);
    for (int t = 0; t < mesh->num_triangles(); ++t) {
        const Eigen::Vector3d b(0.2, 0.3, 0.5);
        CHECK((star.jet(t, b).value - w(mesh->point(t, b))).norm() < 1e-10);
    }
    CHECK(projection_defect(star, u, uh) < 1e-12);
}

TEST_CASE("reconstruction of a discrete eigenpair") {
    const auto model = ComplianceModel::stokes(1.0);
    const Level l(lshape(1), model);
    const ReconstructedField star = reconstruct(l.sigma, l.u, model, l.pair.sigma, l.pair.u, 4);
    CHECK(star.space->local_size() == 30);
    CHECK(star.max_local_residual < 1e-10);
    CHECK(projection_defect(star, l.u, l.pair.u) < 1e-10);

    // lambda* = lambda_h / |u*|^2 with |u*|^2 = 1 + |u* - u_h|^2
    const double ls = lambda_star(l.sigma, star, l.pair.sigma);
    CHECK(ls <= l.pair.lambda * (1.0 + 1e-12));
    CHECK(ls > 0.5 * l.pair.lambda);

    // the energy part of the pair is unchanged when the displacement is scaled
    const Eigen::VectorXd twice = 2.0 * l.pair.u;
    const ReconstructedField scaled = reconstruct(l.sigma, l.u, model, 2.0 * l.pair.sigma, twice, 4);
    CHECK(lambda_star(l.sigma, scaled, Eigen::VectorXd(2.0 * l.pair.sigma)) == doctest::Approx(ls).epsilon(1e-12));
}

TEST_CASE("reconstruction is elementwise and thread independent") {
    const auto model = ComplianceModel::stokes(1.0);
    const Level l(lshape(1), model);
    const ReconstructedField a = reconstruct(l.sigma, l.u, model, l.pair.sigma, l.pair.u, 4);
    const ReconstructedField b = reconstruct(l.sigma, l.u, model, l.pair.sigma, l.pair.u, 4, 3);
    CHECK((a.coeffs - b.coeffs).norm() == 0.0);

    const int t = 5;
    Eigen::VectorXd sigma = l.pair.sigma;
    sigma(l.sigma.element_offset(t)) += 1.0;  // bubble DOF supported on t only
    const ReconstructedField c = reconstruct(l.sigma, l.u, model, sigma, l.pair.u, 4);
    const int n = a.space->local_size();
    for (int e = 0; e < l.mesh->num_triangles(); ++e) {
        const double d = (c.coeffs.segment(a.space->offset(e), n) - a.coeffs.segment(a.space->offset(e), n)).norm();
        if (e == t)
            CHECK(d > 1e-6);
        else
            CHECK(d == 0.0);
    }
}

TEST_CASE("reconstruction degree below k is rejected") {
    const auto model = ComplianceModel::stokes(1.0);
    const Level l(initial_lshape(), model);
    CHECK_THROWS_AS(reconstruct(l.sigma, l.u, model, l.pair.sigma, l.pair.u, 2), Error);
    CHECK_THROWS_AS(reconstruct(l.sigma, l.u, model, l.pair.sigma, Eigen::VectorXd(3), 4), Error);
}
