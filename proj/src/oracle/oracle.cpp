#include "oracle.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace hreig::oracle {

namespace {

void check_dimension(int n) {
    if (n > max_dense_dimension)
        fail(ErrorKind::InvalidArgument, "dense oracle limited to dimension " + std::to_string(max_dense_dimension));
}

Eigen::MatrixXd kernel_of(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double tol = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    int count = 0;
    while (count < ev.size() && std::abs(ev(count)) <= tol) ++count;
    return es.eigenvectors().leftCols(count);
}

std::vector<double> first(std::vector<double> values, int nev) {
    std::sort(values.begin(), values.end());
    if (nev > 0 && nev < static_cast<int>(values.size())) values.resize(nev);
    return values;
}

}  // namespace

DenseSystem densify(const BlockSystem& sys) {
    check_dimension(sys.dim_sigma() + sys.dim_v());
    DenseSystem d;
    d.compliance = Eigen::MatrixXd(sys.compliance);
    d.divergence = Eigen::MatrixXd(sys.divergence);
    d.mass = Eigen::MatrixXd(sys.mass);
    d.trace = sys.trace;
    d.compliance_kernel = kernel_of(d.compliance);
    return d;
}

DenseSystem dense_assemble(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model) {
    const int ns = sspace.dim();
    const int nu = uspace.dim();
    check_dimension(ns + nu);
    const Mesh& mesh = sspace.mesh();
    const TriangleRule rule = triangle_rule(2 * sspace.degree() + 2);
    DenseSystem d;
    d.compliance = Eigen::MatrixXd::Zero(ns, ns);
    d.divergence = Eigen::MatrixXd::Zero(nu, ns);
    d.mass = Eigen::MatrixXd::Zero(nu, nu);
    Eigen::VectorXd trace = Eigen::VectorXd::Zero(ns);

    Eigen::VectorXd unit_s = Eigen::VectorXd::Zero(ns);
    Eigen::VectorXd unit_u = Eigen::VectorXd::Zero(nu);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        std::vector<int> sdofs;
        for (const auto& f : sspace.local(t)) sdofs.push_back(f.dof);
        std::sort(sdofs.begin(), sdofs.end());
        sdofs.erase(std::unique(sdofs.begin(), sdofs.end()), sdofs.end());
        std::vector<int> udofs(uspace.local_size());
        for (int a = 0; a < uspace.local_size(); ++a) udofs[a] = uspace.offset(t) + a;

        const double area = mesh.area(t);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * area;
            std::vector<StressJet> sj;
            for (int i : sdofs) {
                unit_s(i) = 1.0;
                sj.push_back(stress_jet(sspace, unit_s, t, rule.points[q]));
                unit_s(i) = 0.0;
            }
            std::vector<Eigen::Vector2d> uj;
            for (int a : udofs) {
                unit_u(a) = 1.0;
                uj.push_back(displacement_jet(uspace, unit_u, t, rule.points[q]).value);
                unit_u(a) = 0.0;
            }
            for (std::size_t j = 0; j < sdofs.size(); ++j) {
                trace(sdofs[j]) += w * sj[j].value.trace();
                for (std::size_t i = 0; i < sdofs.size(); ++i)
                    d.compliance(sdofs[i], sdofs[j]) +=
                        w * (model.apply(sj[j].value).array() * sj[i].value.array()).sum();
                for (std::size_t a = 0; a < udofs.size(); ++a)
                    d.divergence(udofs[a], sdofs[j]) += w * uj[a].dot(sj[j].div());
            }
            for (std::size_t b = 0; b < udofs.size(); ++b)
                for (std::size_t a = 0; a < udofs.size(); ++a) d.mass(udofs[a], udofs[b]) += w * uj[a].dot(uj[b]);
        }
    }
    if (model.kind() == ComplianceModel::Kind::Stokes) d.trace = trace;
    d.compliance_kernel = kernel_of(d.compliance);
    return d;
}

std::vector<double> dense_eigensolve(const DenseSystem& d, int nev) {
    const int ns = static_cast<int>(d.compliance.rows());
    const int nu = static_cast<int>(d.mass.rows());
    check_dimension(ns + nu);

    // common kernel of compliance and divergence, removed by restricting sigma to its complement
    const Eigen::MatrixXd g = d.compliance + d.divergence.transpose() * d.divergence;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const double tol = 1e-10 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    int nk = 0;
    while (nk < ns && std::abs(es.eigenvalues()(nk)) <= tol) ++nk;
    const Eigen::MatrixXd q = es.eigenvectors().rightCols(ns - nk);
    const int nq = ns - nk;

    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nq + nu, nq + nu);
    k.topLeftCorner(nq, nq) = q.transpose() * d.compliance * q;
    k.topRightCorner(nq, nu) = q.transpose() * d.divergence.transpose();
    k.bottomLeftCorner(nu, nq) = d.divergence * q;
    const Eigen::MatrixXd kinv = k.fullPivLu().inverse();
    Eigen::MatrixXd w = -kinv.bottomRightCorner(nu, nu);
    w = 0.5 * (w + w.transpose()).eval();

    // -W M u = u / lambda; directions with -W y = 0 are infinite eigenvalues and are dropped
    Eigen::MatrixXd minv = d.mass.ldlt().solve(Eigen::MatrixXd::Identity(nu, nu));
    minv = 0.5 * (minv + minv.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(w, minv);
    if (ges.info() != Eigen::Success) fail(ErrorKind::Numeric, "dense generalized eigensolve failed");
    const Eigen::VectorXd& mu = ges.eigenvalues();
    const double cut = 1e-10 * mu.cwiseAbs().maxCoeff();
    std::vector<double> values;
    for (int i = 0; i < nu; ++i)
        if (mu(i) > cut) values.push_back(1.0 / mu(i));
    return first(std::move(values), nev);
}

std::vector<double> schur_eigensolve(const DenseSystem& d, int nev) {
    check_dimension(static_cast<int>(d.compliance.rows() + d.mass.rows()));
    if (d.compliance_kernel.cols() > 0) fail(ErrorKind::InvalidArgument, "Schur route needs a definite compliance");
    const Eigen::LLT<Eigen::MatrixXd> llt(d.compliance);
    if (llt.info() != Eigen::Success) fail(ErrorKind::Numeric, "compliance matrix is not positive definite");
    Eigen::MatrixXd s = d.divergence * llt.solve(d.divergence.transpose());
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(s, d.mass);
    if (ges.info() != Eigen::Success) fail(ErrorKind::Numeric, "dense generalized eigensolve failed");
    std::vector<double> values(ges.eigenvalues().data(), ges.eigenvalues().data() + ges.eigenvalues().size());
    return first(std::move(values), nev);
}

Extrapolation richardson_reference(const std::vector<double>& v) {
    if (v.size() < 3) fail(ErrorKind::InvalidArgument, "extrapolation needs at least three values");
    Extrapolation out;
    out.value = v.back();
    const std::size_t n = v.size();
    const double d1 = v[n - 2] - v[n - 3];
    const double d2 = v[n - 1] - v[n - 2];
    if (d1 == 0.0 && d2 == 0.0) {
        out.note = "constant sequence";
        return out;
    }
    for (std::size_t i = 2; i < n; ++i) {
        const double a = v[i - 1] - v[i - 2];
        const double b = v[i] - v[i - 1];
        if (a * b <= 0.0 || std::abs(b) >= std::abs(a)) {
            out.note = "sequence is not monotonically convergent; no extrapolation";
            return out;
        }
    }
    const double ratio = d2 / d1;
    out.order = -std::log2(ratio);
    out.value = v[n - 1] + d2 * ratio / (1.0 - ratio);
    out.extrapolated = true;
    return out;
}

}  // namespace hreig::oracle
