#include "eigensolver.hpp"

#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace hreig {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix saddle_matrix(const BlockSystem& sys, double shift) {
    const int ns = sys.dim_sigma();
    const int nu = sys.dim_v();
    const bool constrained = sys.trace.has_value();
    const int n = ns + nu + (constrained ? 1 : 0);
    std::vector<Triplet> trip;
    trip.reserve(sys.compliance.nonZeros() + 2 * sys.divergence.nonZeros() + sys.mass.nonZeros() + 2 * ns);
    for (int j = 0; j < sys.compliance.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(sys.compliance, j); it; ++it) trip.emplace_back(it.row(), j, it.value());
    for (int j = 0; j < sys.divergence.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(sys.divergence, j); it; ++it) {
            trip.emplace_back(ns + it.row(), j, it.value());
            trip.emplace_back(j, ns + it.row(), it.value());
        }
    if (shift != 0.0)
        for (int j = 0; j < sys.mass.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(sys.mass, j); it; ++it)
                trip.emplace_back(ns + it.row(), ns + j, shift * it.value());
    if (constrained) {
        const Eigen::VectorXd& c = *sys.trace;
        for (int i = 0; i < ns; ++i)
            if (c(i) != 0.0) {
                trip.emplace_back(i, n - 1, c(i));
                trip.emplace_back(n - 1, i, c(i));
            }
    }
    SparseMatrix k(n, n);
    k.setFromTriplets(trip.begin(), trip.end());
    k.makeCompressed();
    return k;
}

class ShiftInvert {
public:
    ShiftInvert(const BlockSystem& sys, double shift) : sys_(sys), matrix_(saddle_matrix(sys, shift)) {
        lu_.compute(matrix_);
        if (lu_.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "sparse LU factorization failed at shift " << shift;
            fail(ErrorKind::Solver, msg.str());
        }
    }

    /// Full solution y of K y = [0; -M w; 0].
    Eigen::VectorXd solve_full(const Eigen::VectorXd& w) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(matrix_.rows());
        rhs.segment(sys_.dim_sigma(), sys_.dim_v()) = -(sys_.mass * w);
        Eigen::VectorXd y = lu_.solve(rhs);
        if (lu_.info() != Eigen::Success || !y.allFinite()) fail(ErrorKind::Solver, "shifted solve failed");
        return y;
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& w) { return solve_full(w).segment(sys_.dim_sigma(), sys_.dim_v()); }

private:
    const BlockSystem& sys_;
    SparseMatrix matrix_;
    Eigen::UmfPackLU<SparseMatrix> lu_;
};

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

}  // namespace

std::vector<EigenPair> solve_eigen(const BlockSystem& sys, const SolverConfig& config) {
    const int n = sys.dim_v();
    const int nev = config.nev;
    if (nev < 1) fail(ErrorKind::InvalidArgument, "nev must be at least 1");
    if (nev > n) fail(ErrorKind::InvalidArgument, "requested " + std::to_string(nev) + " eigenpairs but dim V = " + std::to_string(n));
    if (!(config.tol > 0.0)) fail(ErrorKind::InvalidArgument, "solver tolerance must be positive");
    if (config.max_iters < 1) fail(ErrorKind::InvalidArgument, "max_iters must be positive");
    const double shift = config.shift.value_or(1.0);

    ShiftInvert op(sys, shift);
    const SparseMatrix& mass = sys.mass;
    std::mt19937_64 rng(config.seed);

    const int m = std::min(n, config.basis_size > 0 ? std::max(config.basis_size, nev + 2) : std::max(2 * nev + 20, 40));
    const int keep = std::min(m - 1, std::max(nev + (m - nev) / 2, nev));

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, m + 1);
    Eigen::MatrixXd mv = Eigen::MatrixXd::Zero(n, m + 1);  // mass * v, kept for the inner products
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);

    const auto m_normalize = [&](Eigen::VectorXd& x) {
        const double nrm = std::sqrt(x.dot(mass * x));
        x /= nrm;
        return nrm;
    };
    const auto orthogonalize = [&](Eigen::VectorXd& w, int count) {
        Eigen::VectorXd coeff = Eigen::VectorXd::Zero(count);
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd c = mv.leftCols(count).transpose() * w;
            w -= v.leftCols(count) * c;
            coeff += c;
        }
        return coeff;
    };

    {
        Eigen::VectorXd v0 = random_vector(n, rng);
        m_normalize(v0);
        v.col(0) = v0;
        mv.col(0) = mass * v0;
    }

    int start = 0;
    int applications = 0;
    bool converged = false;
    Eigen::VectorXd theta;
    Eigen::MatrixXd y;
    std::vector<int> order;
    double beta_last = 0.0;

    while (true) {
        for (int j = start; j < m; ++j) {
            Eigen::VectorXd w = op.apply(v.col(j));
            ++applications;
            const Eigen::VectorXd coeff = orthogonalize(w, j + 1);
            h.block(0, j, j + 1, 1) = coeff;
            double beta = std::sqrt(std::max(0.0, w.dot(mass * w)));
            const double scale = std::max(coeff.cwiseAbs().maxCoeff(), 1e-300);
            if (j + 1 == n) {
                beta = 0.0;
                w.setZero();
            } else if (beta <= 1e-12 * scale) {
                // invariant subspace: continue with a fresh direction
                beta = 0.0;
                w = random_vector(n, rng);
                orthogonalize(w, j + 1);
                m_normalize(w);
            } else {
                w /= beta;
            }
            h(j + 1, j) = beta;
            v.col(j + 1) = w;
            mv.col(j + 1) = mass * w;
        }
        beta_last = h(m, m - 1);

        Eigen::MatrixXd hm = h.topRows(m);
        hm = 0.5 * (hm + hm.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
        theta = es.eigenvalues();
        y = es.eigenvectors();
        order.resize(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return std::abs(theta(a)) > std::abs(theta(b)); });

        converged = true;
        for (int i = 0; i < nev; ++i) {
            const int r = order[i];
            const double res = std::abs(beta_last * y(m - 1, r));
            if (!(res <= config.tol * std::abs(theta(r)))) converged = false;
        }
        if (converged || m == n || applications >= config.max_iters) break;

        // thick restart on the `keep` Ritz vectors nearest the shift
        Eigen::MatrixXd yk(m, keep);
        for (int i = 0; i < keep; ++i) yk.col(i) = y.col(order[i]);
        Eigen::MatrixXd vk = v.leftCols(m) * yk;
        Eigen::MatrixXd mvk = mv.leftCols(m) * yk;
        v.col(keep) = v.col(m);
        mv.col(keep) = mv.col(m);
        v.leftCols(keep) = vk;
        mv.leftCols(keep) = mvk;
        h.setZero();
        for (int i = 0; i < keep; ++i) {
            h(i, i) = theta(order[i]);
            h(keep, i) = beta_last * yk(m - 1, i);
            h(i, keep) = h(keep, i);
        }
        start = keep;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "eigensolver did not converge after " << applications << " operator applications (shift " << shift << ")";
        fail(ErrorKind::Solver, msg.str());
    }

    std::vector<EigenPair> pairs;
    const int ns = sys.dim_sigma();
    for (int i = 0; i < nev; ++i) {
        const int r = order[i];
        const double lambda_ritz = shift + 1.0 / theta(r);
        Eigen::VectorXd x = v.leftCols(m) * y.col(r);
        const Eigen::VectorXd full = op.solve_full(x);
        const double factor = lambda_ritz - shift;
        EigenPair p;
        p.sigma = factor * full.head(ns);
        p.u = factor * full.segment(ns, n);
        double mult = sys.trace ? factor * full(ns + n) : 0.0;
        const double unorm = std::sqrt(p.u.dot(mass * p.u));
        if (!(unorm > 0.0)) fail(ErrorKind::Solver, "eigenfunction vanished during normalization");
        p.sigma /= unorm;
        p.u /= unorm;
        mult /= unorm;
        p.pressure_multiplier = mult;
        p.lambda = -p.u.dot(sys.divergence * p.sigma);
        p.iterations = applications;

        Eigen::VectorXd r1 = sys.compliance * p.sigma + sys.divergence.transpose() * p.u;
        if (sys.trace) r1 += mult * *sys.trace;
        const Eigen::VectorXd mu = mass * p.u;
        const Eigen::VectorXd r2 = sys.divergence * p.sigma + p.lambda * mu;
        const Eigen::VectorXd bt_u = sys.divergence.transpose() * p.u;
        p.residual_constitutive = r1.norm() / std::max(bt_u.norm(), 1e-300);
        p.residual_equilibrium = r2.norm() / std::max(std::abs(p.lambda) * mu.norm(), 1e-300);
        pairs.push_back(std::move(p));
    }
    std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
    return pairs;
}

int align(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_coarse_prolonged, const SparseMatrix& fine_mass) {
    if (u_fine.size() != u_coarse_prolonged.size() || u_fine.size() != fine_mass.rows())
        fail(ErrorKind::InvalidArgument, "align: size mismatch");
    const double ip = u_fine.dot(fine_mass * u_coarse_prolonged);
    if (ip == 0.0) fail(ErrorKind::Numeric, "align: eigenfunction is orthogonal to the reference");
    return ip > 0.0 ? 1 : -1;
}

}  // namespace hreig
