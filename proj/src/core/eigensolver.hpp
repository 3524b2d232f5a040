#pragma once

#include "assembly.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hreig {

struct SolverConfig {
    std::optional<double> shift;  // unset: 1.0 on a single solve, 0.1 * previous lambda inside the AFEM loop
    double tol = 1e-10;           // relative Ritz residual
    int max_iters = 2000;         // shifted-operator applications
    int nev = 1;
    int basis_size = 0;           // Krylov basis size; 0 picks max(2 nev + 20, 40)
    std::uint64_t seed = 1;
};

/// Discrete eigenpair, normalized so that (u, u) = 1.
struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd sigma;
    Eigen::VectorXd u;
    double pressure_multiplier = 0.0;  // Lagrange multiplier of the mean-trace constraint
    /// Relative residuals of the two block equations.
    double residual_constitutive = 0.0;
    double residual_equilibrium = 0.0;
    int iterations = 0;
};

/// The nev eigenvalues nearest the shift (ascending) of
///   (A sigma, tau) + (div tau, u) = 0,  (div sigma, v) = -lambda (u, v),
/// with the mean-trace constraint added when the system carries a trace vector.
/// Krylov-Schur Lanczos on the shift-inverted operator, factorized once with UMFPACK.
std::vector<EigenPair> solve_eigen(const BlockSystem& system, const SolverConfig& config);

/// +1 or -1 so that sign * u_fine has positive L2 product with the prolonged coarse eigenfunction.
int align(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_coarse_prolonged, const SparseMatrix& fine_mass);

}  // namespace hreig
