#pragma once

#include "error.hpp"

#include <Eigen/Dense>

#include <string>

namespace hreig {

/// Pointwise compliance A sigma = scale * (sigma - trace_weight * tr(sigma) I).
class ComplianceModel {
public:
    enum class Kind { Stokes, Elasticity };

    /// A sigma = (sigma - tr(sigma)/2 I) / (2 nu); only positive semidefinite.
    static ComplianceModel stokes(double viscosity) {
        if (!(viscosity > 0.0)) fail(ErrorKind::InvalidArgument, "Stokes viscosity must be positive");
        return ComplianceModel(Kind::Stokes, viscosity, 0.0, 1.0 / (2.0 * viscosity), 0.5);
    }

    /// A sigma = (sigma - lame/(2 mu + 2 lame) tr(sigma) I) / (2 mu).
    static ComplianceModel elasticity(double mu, double lame) {
        if (!(mu > 0.0) || !(lame >= 0.0)) fail(ErrorKind::InvalidArgument, "elasticity requires mu > 0 and lambda >= 0");
        return ComplianceModel(Kind::Elasticity, mu, lame, 1.0 / (2.0 * mu), lame / (2.0 * mu + 2.0 * lame));
    }

    Kind kind() const { return kind_; }
    bool positive_definite() const { return kind_ == Kind::Elasticity; }
    double first_parameter() const { return p1_; }   // nu or mu
    double second_parameter() const { return p2_; }  // unused or Lame lambda

    Eigen::Matrix2d apply(const Eigen::Matrix2d& sigma) const {
        return scale_ * (sigma - trace_weight_ * sigma.trace() * Eigen::Matrix2d::Identity());
    }

    std::string name() const { return kind_ == Kind::Stokes ? "stokes" : "elasticity"; }

private:
    ComplianceModel(Kind kind, double p1, double p2, double scale, double trace_weight)
        : kind_(kind), p1_(p1), p2_(p2), scale_(scale), trace_weight_(trace_weight) {}

    Kind kind_;
    double p1_;
    double p2_;
    double scale_;
    double trace_weight_;
};

}  // namespace hreig
