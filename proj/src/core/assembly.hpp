#pragma once

#include "compliance.hpp"
#include "fem_spaces.hpp"


#include <optional>
#include <string>

namespace hreig {


/// Operators of the discrete eigenproblem
///   compliance  (A phi_j, phi_i)          dim_sigma x dim_sigma
///   divergence  (div phi_j, psi_i)        dim_v x dim_sigma
///   mass        (psi_j, psi_i)            dim_v x dim_v
///   trace       integral of tr(phi_j)     present for the Stokes compliance only
struct BlockSystem {
    SparseMatrix compliance;
    SparseMatrix divergence;
    SparseMatrix mass;
    std::optional<Eigen::VectorXd> trace;

    int dim_sigma() const { return static_cast<int>(compliance.rows()); }
    int dim_v() const { return static_cast<int>(mass.rows()); }
};

struct AssemblyOptions {
    int quadrature_degree = -1;  // defaults to 2k; smaller values are rejected
    int threads = 1;
};

BlockSystem assemble(const StressSpace& sigma_space, const DisplacementSpace& u_space, const ComplianceModel& model,
                     const AssemblyOptions& options = {});

/// Elementwise L2 projection onto the displacement space.
Eigen::VectorXd l2_project(const DisplacementSpace& space, const PiecewiseVectorField& f, int quadrature_degree = -1);

/// Local mass matrix of the displacement basis on one element.
Eigen::MatrixXd local_mass(const DisplacementSpace& space, int element);

/// Writes the three matrices as <prefix>_compliance.mtx, <prefix>_divergence.mtx, <prefix>_mass.mtx.
void write_matrix_market(const BlockSystem& system, const std::string& prefix);

}  // namespace hreig
