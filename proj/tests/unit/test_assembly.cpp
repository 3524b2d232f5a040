#include "doctest.h"

#include "assembly.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "support.hpp"

#include <random>

using namespace hreig;

namespace {

struct Setup {
    std::shared_ptr<const Mesh> mesh;
    StressSpace sigma;
    DisplacementSpace u;

    explicit Setup(Mesh m, int k = 3)
        : mesh(std::make_shared<const Mesh>(std::move(m))), sigma(mesh, k), u(mesh, k) {}
};

Eigen::VectorXd random_coeffs(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = d(rng);
    return v;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("sparse assembly matches the dense oracle assembly") {
    const Setup s(test::random_refinement(initial_lshape(), 2, 0.4, 6));
    for (const ComplianceModel model : {ComplianceModel::stokes(1.0), ComplianceModel::elasticity(1.0, 2.0)}) {
        const BlockSystem sys = assemble(s.sigma, s.u, model);
        const oracle::DenseSystem dense = oracle::dense_assemble(s.sigma, s.u, model);
        CHECK(max_abs(Eigen::MatrixXd(sys.compliance) - dense.compliance) <= 1e-13 * max_abs(dense.compliance));
        CHECK(max_abs(Eigen::MatrixXd(sys.divergence) - dense.divergence) <= 1e-13 * max_abs(dense.divergence));
        CHECK(max_abs(Eigen::MatrixXd(sys.mass) - dense.mass) <= 1e-13 * max_abs(dense.mass));
        CHECK(sys.trace.has_value() == dense.trace.has_value());
        if (sys.trace) CHECK((*sys.trace - *dense.trace).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("compliance matrix is exactly symmetric and semidefinite") {
    const Setup s(bisect_all(initial_lshape()));
    const BlockSystem stokes = assemble(s.sigma, s.u, ComplianceModel::stokes(1.0));
    const SparseMatrix t = stokes.compliance.transpose();
    CHECK((stokes.compliance - t).norm() == 0.0);

    const oracle::DenseSystem ds = oracle::densify(stokes);
    // Stokes: the kernel holds the pure-pressure fields p I, among them the identity
    CHECK(ds.compliance_kernel.cols() > 1);
    const Eigen::VectorXd id = interpolate_stress(s.sigma, [](int, const Point&) { return Sym2::Identity().eval(); });
    CHECK((stokes.compliance * id).norm() < 1e-12);
    CHECK((stokes.divergence * id).norm() < 1e-12);
    CHECK(stokes.trace->dot(id) == doctest::Approx(2.0 * 3.0));

    const BlockSystem el = assemble(s.sigma, s.u, ComplianceModel::elasticity(1.0, 1.0));
    CHECK_FALSE(el.trace.has_value());
    CHECK(oracle::densify(el).compliance_kernel.cols() == 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(el.compliance)};
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("divergence matrix equals the mass matrix times the divergence coefficients") {
    const Setup s(test::random_refinement(initial_lshape(), 3, 0.3, 9));
    const BlockSystem sys = assemble(s.sigma, s.u, ComplianceModel::stokes(1.0));
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd c = random_coeffs(s.sigma.dim(), trial);
        const Eigen::VectorXd d = interpolate_displacement(s.u, [&](int t, const Point& x) {
            return Eigen::Vector2d(stress_jet(s.sigma, c, t, s.mesh->barycentric(t, x)).div());
        });
        const Eigen::VectorXd lhs = sys.divergence * c;
        CHECK((lhs - sys.mass * d).norm() < 1e-11 * lhs.norm());
    }
}

TEST_CASE("mass matrix integrates constants") {
    const Setup s(bisect_all(initial_lshape()));
    const BlockSystem sys = assemble(s.sigma, s.u, ComplianceModel::stokes(1.0));
    const Eigen::VectorXd e1 = interpolate_displacement(s.u, [](int, const Point&) { return Eigen::Vector2d(1.0, 0.0); });
    CHECK(e1.dot(sys.mass * e1) == doctest::Approx(3.0));
    const Eigen::VectorXd proj = l2_project(s.u, [](int, const Point& x) { return Eigen::Vector2d(x.x() * x.y(), 1.0); });
    const Eigen::VectorXd exact =
        interpolate_displacement(s.u, [](int, const Point& x) { return Eigen::Vector2d(x.x() * x.y(), 1.0); });
    CHECK((proj - exact).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compliance scales with the viscosity") {
    const Setup s(bisect_all(initial_lshape()));
    const BlockSystem a = assemble(s.sigma, s.u, ComplianceModel::stokes(1.0));
    const BlockSystem b = assemble(s.sigma, s.u, ComplianceModel::stokes(4.0));
    CHECK((Eigen::MatrixXd(a.compliance) - 4.0 * Eigen::MatrixXd(b.compliance)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((Eigen::MatrixXd(a.divergence) - Eigen::MatrixXd(b.divergence)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compliance energy is invariant under prolongation") {
    const Setup coarse(test::random_refinement(initial_lshape(), 2, 0.4, 31));
    const Setup fine(bisect_all(*coarse.mesh));
    const auto model = ComplianceModel::elasticity(1.0, 3.0);
    const BlockSystem ac = assemble(coarse.sigma, coarse.u, model);
    const BlockSystem af = assemble(fine.sigma, fine.u, model);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd c = random_coeffs(coarse.sigma.dim(), trial);
        const Eigen::VectorXd f = prolong(coarse.sigma, fine.sigma, c);
        const double ec = c.dot(ac.compliance * c);
        CHECK(std::abs(f.dot(af.compliance * f) - ec) <= 1e-10 * ec);
    }
}

TEST_CASE("assembly results do not depend on the thread count") {
    const Setup s(test::random_refinement(initial_lshape(), 3, 0.4, 2));
    AssemblyOptions one, four;
    four.threads = 4;
    const BlockSystem a = assemble(s.sigma, s.u, ComplianceModel::stokes(1.0), one);
    const BlockSystem b = assemble(s.sigma, s.u, ComplianceModel::stokes(1.0), four);
    CHECK((a.compliance - b.compliance).norm() == 0.0);
    CHECK((a.divergence - b.divergence).norm() == 0.0);
}

TEST_CASE("quadrature below 2k is rejected") {
    const Setup s(initial_lshape());
    AssemblyOptions low;
    low.quadrature_degree = 5;
    CHECK_THROWS_AS(assemble(s.sigma, s.u, ComplianceModel::stokes(1.0), low), Error);
    CHECK_THROWS_AS(ComplianceModel::stokes(0.0), Error);
    CHECK_THROWS_AS(ComplianceModel::elasticity(1.0, -1.0), Error);
}
