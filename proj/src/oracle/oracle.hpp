#pragma once

#include "assembly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hreig::oracle {

/// Dense copies of the operators plus an explicit basis of the compliance kernel.
struct DenseSystem {
    Eigen::MatrixXd compliance;
    Eigen::MatrixXd divergence;
    Eigen::MatrixXd mass;
    std::optional<Eigen::VectorXd> trace;
    Eigen::MatrixXd compliance_kernel;  // columns span ker(compliance)
};

constexpr int max_dense_dimension = 2000;

DenseSystem densify(const BlockSystem& system);

/// Assembles the operators densely by evaluating global coefficient vectors with the
/// pointwise field evaluators (a path independent of the element tables), at degree 2k+2.
DenseSystem dense_assemble(const StressSpace& sigma_space, const DisplacementSpace& u_space,
                           const ComplianceModel& model);

/// All finite eigenvalues of the pencil after deflating the common kernel of the compliance
/// and divergence operators; ascending. Returns the first nev (all when nev <= 0).
std::vector<double> dense_eigensolve(const DenseSystem& system, int nev = 0);

/// Eigenvalues of B A^{-1} B^T u = lambda M u; requires a definite compliance.
std::vector<double> schur_eigensolve(const DenseSystem& system, int nev = 0);

struct Extrapolation {
    double value = 0.0;
    double order = 0.0;  // estimated convergence order per level, -log2 of the difference ratio
    bool extrapolated = false;
    std::string note;
};

/// Aitken extrapolation of the last three values of a convergent sequence.
Extrapolation richardson_reference(const std::vector<double>& values);

}  // namespace hreig::oracle
