#pragma once

#include "compliance.hpp"
#include "fem_spaces.hpp"

#include <memory>

namespace hreig {

/// Elementwise P_m displacement reconstructed from a discrete eigenpair.
struct ReconstructedField {
    std::shared_ptr<const DisplacementSpace> space;  // discontinuous P_m
    Eigen::VectorXd coeffs;
    /// Largest relative residual of the local saddle-point solves.
    double max_local_residual = 0.0;

    int degree() const { return space->poly_degree(); }
    DisplacementJet jet(int element, const Eigen::Vector3d& bary) const {
        return displacement_jet(*space, coeffs, element, bary);
    }
};

/// On each element: minimize |A sigma_h - eps(v)|_K over P_m(K;R^2) subject to P_K v = u_h,
/// with P_K the L2 projection onto P_{k-1}. Requires m >= k.
ReconstructedField reconstruct(const StressSpace& sigma_space, const DisplacementSpace& u_space,
                               const ComplianceModel& model, const Eigen::VectorXd& sigma, const Eigen::VectorXd& u,
                               int m, int threads = 1);

/// -sum (div sigma_h, u*) / sum (u*, u*).
double lambda_star(const StressSpace& sigma_space, const ReconstructedField& ustar, const Eigen::VectorXd& sigma);

/// max over elements of |P_K u* - u_h|_{L2(K)}.
double projection_defect(const ReconstructedField& ustar, const DisplacementSpace& u_space, const Eigen::VectorXd& u);

}  // namespace hreig
