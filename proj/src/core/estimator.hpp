#pragma once

#include "compliance.hpp"
#include "fem_spaces.hpp"
#include "postprocess.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace hreig {

/// Squared contributions of one element to the residual estimator.
struct ElementIndicator {
    int element = -1;
    double curlcurl = 0.0;  // h^4 |curl curl(A sigma)|^2
    double edge = 0.0;      // sum over the element's edges of h |J1|^2 + h^3 |J2|^2
    double sym = 0.0;       // h^2 |A sigma - eps(u)|^2
    double jump = 0.0;      // sum over the element's edges of h |[u]|^2

    double total() const { return curlcurl + edge + sym + jump; }
};

struct EstimatorReport {
    std::vector<ElementIndicator> elements;

    std::vector<double> totals() const;
};

/// Matrix curl taken row-wise: curl M = (d1 M12 - d2 M11, d1 M22 - d2 M12).
Eigen::Vector2d curl(const Sym2& dx, const Sym2& dy);
double curl_curl(const Sym2& dxx, const Sym2& dxy, const Sym2& dyy);

EstimatorReport eta_local_all(const StressSpace& sigma_space, const DisplacementSpace& u_space,
                              const ComplianceModel& model, const Eigen::VectorXd& sigma, const Eigen::VectorXd& u,
                              int threads = 1);
ElementIndicator eta_local(const StressSpace& sigma_space, const DisplacementSpace& u_space,
                           const ComplianceModel& model, const Eigen::VectorXd& sigma, const Eigen::VectorXd& u,
                           int element);
/// Sum of the squared element indicators.
double eta_global(const EstimatorReport& report);
double eta_subset(const EstimatorReport& report, std::span<const int> elements);

/// Squared contributions to the postprocessed estimator. Interior edge jumps are split evenly
/// between the two neighbours.
struct StarIndicator {
    int element = -1;
    double sym = 0.0;       // |A sigma - eps(u*)|^2
    double residual = 0.0;  // h^2 |lambda* u* + div sigma|^2
    double jump = 0.0;      // h_e^{-1} |[u*]|^2

    double total() const { return sym + residual + jump; }
};

struct StarReport {
    std::vector<StarIndicator> elements;

    std::vector<double> totals() const;
};

StarReport eta_star(const StressSpace& sigma_space, const ComplianceModel& model, const Eigen::VectorXd& sigma,
                    const ReconstructedField& ustar, double lambda_star, int threads = 1);
double eta_star_global(const StarReport& report);

/// One row per element: element,curlcurl,edge,sym,jump,total.
void write_estimator_csv(const EstimatorReport& report, std::ostream& out);

}  // namespace hreig
