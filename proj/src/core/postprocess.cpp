#include "postprocess.hpp"

#include "assembly.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

#include <cmath>

namespace hreig {

namespace {

struct LocalResult {
    Eigen::VectorXd coeffs;
    double residual = 0.0;
};

LocalResult solve_local(const StressSpace& sspace, const DisplacementSpace& uspace, const DisplacementSpace& star,
                        const ComplianceModel& model, const TriangleRule& rule, const Eigen::VectorXd& sigma,
                        const Eigen::VectorXd& u, int t) {
    const auto chi = eval_displacement(star, t, rule.points);
    const auto psi = eval_displacement(uspace, t, rule.points);
    const double area = sspace.mesh().area(t);
    const int nc = chi.nbasis;
    const int np = psi.nbasis;
    const Eigen::VectorXd uloc = u.segment(uspace.offset(t), np);

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(nc + np, nc + np);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc + np);
    for (int q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q] * area;
        const Sym2 a_sigma = model.apply(stress_jet(sspace, sigma, t, rule.points[q]).value);
        Eigen::Vector2d uh = Eigen::Vector2d::Zero();
        for (int a = 0; a < np; ++a) uh += uloc(a) * psi.value[q * np + a];
        for (int i = 0; i < nc; ++i) {
            const Sym2& ei = chi.sym_grad[q * nc + i];
            rhs(i) += w * (a_sigma.array() * ei.array()).sum();
            for (int j = 0; j < nc; ++j) s(i, j) += w * (ei.array() * chi.sym_grad[q * nc + j].array()).sum();
            for (int a = 0; a < np; ++a) {
                // constraint rows are scaled by 1/|K| so both blocks are O(1) on small elements
                const double c = rule.weights[q] * psi.value[q * np + a].dot(chi.value[q * nc + i]);
                s(nc + a, i) += c;
                s(i, nc + a) += c;
            }
        }
        for (int a = 0; a < np; ++a) rhs(nc + a) += rule.weights[q] * psi.value[q * np + a].dot(uh);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    lu.setThreshold(1e-12);
    if (lu.rank() != nc + np)
        fail(ErrorKind::Numeric, "local reconstruction system is singular on element " + std::to_string(t));
    LocalResult out;
    const Eigen::VectorXd x = lu.solve(rhs);
    out.coeffs = x.head(nc);
    out.residual = (s * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
    return out;
}

}  // namespace

ReconstructedField reconstruct(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                               const Eigen::VectorXd& sigma, const Eigen::VectorXd& u, int m, int threads) {
    const int k = sspace.degree();
    if (m < k) fail(ErrorKind::InvalidArgument, "postprocessing degree m must be at least k");
    if (sigma.size() != sspace.dim() || u.size() != uspace.dim())
        fail(ErrorKind::InvalidArgument, "reconstruct: coefficient size mismatch");
    ReconstructedField out;
    out.space = std::make_shared<DisplacementSpace>(sspace.mesh_ptr(), m + 1);
    const TriangleRule rule = triangle_rule(2 * m);
    const int nt = sspace.mesh().num_triangles();
    std::vector<LocalResult> local(nt);
    parallel_for(nt, threads, [&](int t) { local[t] = solve_local(sspace, uspace, *out.space, model, rule, sigma, u, t); });
    out.coeffs.resize(out.space->dim());
    for (int t = 0; t < nt; ++t) {
        out.coeffs.segment(out.space->offset(t), out.space->local_size()) = local[t].coeffs;
        out.max_local_residual = std::max(out.max_local_residual, local[t].residual);
    }
    return out;
}

double lambda_star(const StressSpace& sspace, const ReconstructedField& ustar, const Eigen::VectorXd& sigma) {
    const Mesh& mesh = sspace.mesh();
    const TriangleRule rule = triangle_rule(2 * std::max(ustar.degree(), sspace.degree()));
    double num = 0.0;
    double den = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = mesh.area(t);
        for (int q = 0; q < rule.size(); ++q) {
            const Eigen::Vector2d us = ustar.jet(t, rule.points[q]).value;
            const Eigen::Vector2d div = stress_jet(sspace, sigma, t, rule.points[q]).div();
            num += rule.weights[q] * area * div.dot(us);
            den += rule.weights[q] * area * us.squaredNorm();
        }
    }
    if (!(den > 0.0)) fail(ErrorKind::Numeric, "reconstructed displacement vanishes");
    return -num / den;
}

double projection_defect(const ReconstructedField& ustar, const DisplacementSpace& uspace, const Eigen::VectorXd& u) {
    const Mesh& mesh = uspace.mesh();
    const TriangleRule rule = triangle_rule(uspace.poly_degree() + ustar.degree() + 2);
    double worst = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto psi = eval_displacement(uspace, t, rule.points);
        const double area = mesh.area(t);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(psi.nbasis);
        for (int q = 0; q < rule.size(); ++q) {
            const Eigen::Vector2d us = ustar.jet(t, rule.points[q]).value;
            for (int a = 0; a < psi.nbasis; ++a) rhs(a) += rule.weights[q] * area * psi.value[q * psi.nbasis + a].dot(us);
        }
        const Eigen::MatrixXd mloc = local_mass(uspace, t);
        const Eigen::VectorXd diff = mloc.ldlt().solve(rhs) - u.segment(uspace.offset(t), psi.nbasis);
        worst = std::max(worst, std::sqrt(std::max(0.0, diff.dot(mloc * diff))));
    }
    return worst;
}

}  // namespace hreig
