#include "doctest.h"

#include "eigensolver.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace hreig;

namespace {

struct Problem {
    std::shared_ptr<const Mesh> mesh;
    StressSpace sigma;
    DisplacementSpace u;
    BlockSystem sys;

    Problem(Mesh m, const ComplianceModel& model, int k = 3)
        : mesh(std::make_shared<const Mesh>(std::move(m))), sigma(mesh, k), u(mesh, k), sys(assemble(sigma, u, model)) {}
};

Mesh lshape_uniform(int levels) {
    Mesh m = initial_lshape();
    for (int i = 0; i < levels; ++i) m = bisect_all(m);
    return m;
}

}  // namespace

TEST_CASE("Stokes eigenvalues agree with the dense oracle") {
    const Problem p(lshape_uniform(2), ComplianceModel::stokes(1.0));
    CHECK(p.sigma.dim() + p.u.dim() <= 2000);
    SolverConfig cfg;
    cfg.nev = 4;
    cfg.shift = 0.0;
    const auto pairs = solve_eigen(p.sys, cfg);
    const auto dense = oracle::dense_eigensolve(oracle::densify(p.sys), 4);
    REQUIRE(pairs.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(pairs[i].lambda - dense[i]) <= 1e-8 * dense[i]);
        CHECK(pairs[i].u.dot(p.sys.mass * pairs[i].u) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(pairs[i].sigma.dot(p.sys.compliance * pairs[i].sigma) - pairs[i].lambda) <= 1e-10 * pairs[i].lambda);
        CHECK(p.sys.trace->dot(pairs[i].sigma) == doctest::Approx(0.0).scale(1e-8));
        CHECK(pairs[i].residual_equilibrium < 1e-8);
        CHECK(pairs[i].residual_constitutive < 1e-8);
    }
    // the oracle's two independent assemblies agree on the spectrum too
    const auto dense2 = oracle::dense_eigensolve(oracle::dense_assemble(p.sigma, p.u, ComplianceModel::stokes(1.0)), 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(dense2[i] - dense[i]) <= 1e-9 * dense[i]);
}

TEST_CASE("eigenvalues do not depend on the shift") {
    const Problem p(lshape_uniform(2), ComplianceModel::stokes(1.0));
    std::vector<double> first;
    for (double shift : {0.0, 1.0, 20.0, -5.0}) {
        SolverConfig cfg;
        cfg.shift = shift;
        cfg.seed = 3;
        first.push_back(solve_eigen(p.sys, cfg)[0].lambda);
    }
    for (double v : first) CHECK(std::abs(v - first[0]) <= 1e-10 * first[0]);
}

TEST_CASE("elasticity spectrum: pencil and Schur routes agree") {
    const Problem p(lshape_uniform(1), ComplianceModel::elasticity(1.0, 1.0));
    const auto dense = oracle::densify(p.sys);
    const auto a = oracle::dense_eigensolve(dense, 6);
    const auto b = oracle::schur_eigensolve(dense, 6);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9 * b[i]);
    SolverConfig cfg;
    cfg.nev = 3;
    cfg.shift = 0.0;
    const auto pairs = solve_eigen(p.sys, cfg);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(pairs[i].lambda - b[i]) <= 1e-8 * b[i]);
}

TEST_CASE("the full pencil count equals dim V") {
    const Problem p(initial_lshape(), ComplianceModel::elasticity(1.0, 1.0));
    const auto all = oracle::schur_eigensolve(oracle::densify(p.sys));
    CHECK(static_cast<int>(all.size()) == p.u.dim());
    const auto pencil = oracle::dense_eigensolve(oracle::densify(p.sys));
    CHECK(static_cast<int>(pencil.size()) == p.u.dim());
}

TEST_CASE("the solver is deterministic for a fixed seed") {
    const Problem p(lshape_uniform(1), ComplianceModel::stokes(1.0));
    SolverConfig cfg;
    const auto a = solve_eigen(p.sys, cfg);
    const auto b = solve_eigen(p.sys, cfg);
    CHECK(a[0].lambda == b[0].lambda);
    CHECK((a[0].u - b[0].u).norm() == 0.0);
}

TEST_CASE("align returns the sign of the L2 product") {
    const Problem p(lshape_uniform(1), ComplianceModel::stokes(1.0));
    const auto pair = solve_eigen(p.sys, {})[0];
    CHECK(align(pair.u, pair.u, p.sys.mass) == 1);
    CHECK(align(pair.u, Eigen::VectorXd(-pair.u), p.sys.mass) == -1);
    CHECK_THROWS_AS(align(pair.u, Eigen::VectorXd::Zero(pair.u.size()), p.sys.mass), Error);
}

TEST_CASE("invalid solver requests") {
    const Problem p(initial_lshape(), ComplianceModel::stokes(1.0));
    SolverConfig cfg;
    cfg.nev = p.u.dim() + 1;
    CHECK_THROWS_AS(solve_eigen(p.sys, cfg), Error);
    cfg.nev = 0;
    CHECK_THROWS_AS(solve_eigen(p.sys, cfg), Error);
    SolverConfig starved;
    starved.max_iters = 3;
    starved.basis_size = 2;
    CHECK_THROWS_AS(solve_eigen(Problem(lshape_uniform(2), ComplianceModel::stokes(1.0)).sys, starved), Error);
}
