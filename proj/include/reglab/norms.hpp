#pragma once

#include "reglab/field.hpp"
#include "reglab/weights.hpp"

#include <cstdint>
#include <limits>

namespace reglab {

/// Exponents (q, s) of L^{q,s}; s may be +infinity.
struct LorentzParams {
    double q = 2.0;
    double s = 2.0;

    static constexpr double infinity = std::numeric_limits<double>::infinity();
};

/// Distinct-value count above which quantile knots replace exact knots.
inline constexpr std::size_t kMaxExactKnots = 4096;

/// [q * int_0^inf lambda^{s-1} D(lambda)^{s/q} dlambda]^{1/s}, D the
/// omega-distribution of f over `region`; sup form for s = infinity.
double lorentz_norm(const ScalarField& field, const Weight& weight, const CellSet& region, const LorentzParams& params,
                    int lambda_quadrature = 64);

enum class YoungKind { power, power_log };

class YoungFunction {
public:
    static YoungFunction power(double p);
    static YoungFunction power_log(double p);

    double operator()(double t) const;
    double inverse(double y) const;
    /// p1 with Phi(t lambda) <= C t^{p1} Phi(lambda) for t >= 1.
    double delta2_p1() const;
    /// Largest Phi(2t)/Phi(t) over log-spaced samples in [lo, hi].
    double delta2_constant(double lo = 1e-6, double hi = 1e6, int samples = 241) const;

    YoungKind kind() const { return kind_; }
    double p() const { return p_; }

private:
    YoungFunction(YoungKind kind, double p);
    YoungKind kind_;
    double p_;
};

/// inf{t > 0 : ||Phi(|f|/t)||_{L^{q,s}_omega} <= 1}.
double luxemburg_norm(const ScalarField& field, const Weight& weight, const CellSet& region, const YoungFunction& phi,
                      const LorentzParams& params, int lambda_quadrature = 64);

/// Max over random pairs in R^2 of
/// (|g1-g2|^p - eps|g1|^p) / ((|g1|+|g2|)^{p-2} |g1-g2|^2), clipped at 0.
double estimate_fund_constant(double p, double epsilon, int samples, std::uint64_t seed);

} // namespace reglab
