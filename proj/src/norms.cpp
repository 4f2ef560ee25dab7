#include "reglab/norms.hpp"

#include "reglab/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace reglab {

namespace {

struct Knots {
    std::vector<double> value; ///< distinct |f| levels, ascending, all > 0
    std::vector<double> tail;  ///< tail[k] = omega({|f| >= value[k]})
};

// Level sets of |f| over the region with their omega-masses.
Knots level_knots(const ScalarField& field, const Weight& weight, const CellSet& region) {
    const double area = field.grid.spacing() * field.grid.spacing();
    std::vector<std::pair<double, double>> vw;
    vw.reserve(region.size());
    for (std::size_t k : region) {
        const double v = std::abs(field[k]);
        if (v > 0.0) vw.emplace_back(v, weight.values[k] * area);
    }
    std::sort(vw.begin(), vw.end());
    Knots out;
    for (const auto& [v, w] : vw) {
        if (!out.value.empty() && out.value.back() == v) {
            out.tail.back() += w;
        } else {
            out.value.push_back(v);
            out.tail.push_back(w);
        }
    }
    for (std::size_t k = out.tail.size(); k-- > 1;) out.tail[k - 1] += out.tail[k];
    return out;
}

// D(lambda) = omega({|f| > lambda}) from the knot table.
double tail_above(const Knots& kn, double lambda) {
    const auto it = std::upper_bound(kn.value.begin(), kn.value.end(), lambda);
    return it == kn.value.end() ? 0.0 : kn.tail[static_cast<std::size_t>(it - kn.value.begin())];
}

} // namespace

double lorentz_norm(const ScalarField& field, const Weight& weight, const CellSet& region, const LorentzParams& params,
                    int lambda_quadrature) {
    require(!region.empty(), "lorentz: empty field");
    require(params.q > 0.0 && params.s > 0.0, "lorentz: q and s must be positive");
    require(lambda_quadrature >= 64, "lorentz: lambda_quadrature must be >= 64");
    const Knots kn = level_knots(field, weight, region);
    if (kn.value.empty()) return 0.0;
    const double q = params.q, s = params.s;

    if (std::isinf(s)) {
        double best = 0.0;
        for (std::size_t k = 0; k < kn.value.size(); ++k)
            best = std::max(best, kn.value[k] * std::pow(kn.tail[k], 1.0 / q));
        return best;
    }

    double integral = 0.0;
    if (kn.value.size() <= kMaxExactKnots) {
        // D is constant on [value[k-1], value[k]), so each piece integrates in closed form.
        double prev = 0.0;
        for (std::size_t k = 0; k < kn.value.size(); ++k) {
            const double vs = std::pow(kn.value[k], s);
            integral += std::pow(kn.tail[k], s / q) * (vs - prev);
            prev = vs;
        }
    } else {
        // Quantile knots, trapezoid in lambda^s inside each knot interval.
        const std::size_t K = kMaxExactKnots;
        std::vector<double> knots{0.0};
        for (std::size_t k = 1; k <= K; ++k) knots.push_back(kn.value[(kn.value.size() - 1) * k / K]);
        for (std::size_t k = 1; k < knots.size(); ++k) {
            const double a = std::pow(knots[k - 1], s), b = std::pow(knots[k], s);
            if (b <= a) continue;
            const double step = (b - a) / lambda_quadrature;
            double piece = 0.0;
            for (int i = 0; i <= lambda_quadrature; ++i) {
                const double lam = std::pow(a + i * step, 1.0 / s);
                const double d = std::pow(tail_above(kn, lam), s / q);
                piece += (i == 0 || i == lambda_quadrature) ? 0.5 * d : d;
            }
            integral += piece * step;
        }
    }
    return std::pow(q * integral / s, 1.0 / s);
}

YoungFunction::YoungFunction(YoungKind kind, double p) : kind_(kind), p_(p) {
    require(p >= 1.0 && std::isfinite(p), "young: p must lie in [1, inf)");
}

YoungFunction YoungFunction::power(double p) { return YoungFunction(YoungKind::power, p); }
YoungFunction YoungFunction::power_log(double p) { return YoungFunction(YoungKind::power_log, p); }

double YoungFunction::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    const double tp = std::pow(t, p_);
    return kind_ == YoungKind::power ? tp : tp * std::log(std::numbers::e + t);
}

double YoungFunction::inverse(double y) const {
    if (y <= 0.0) return 0.0;
    if (kind_ == YoungKind::power) return std::pow(y, 1.0 / p_);
    // Phi is increasing; bracket then Newton safeguarded by bisection.
    double lo = 0.0, hi = std::max(1.0, std::pow(y, 1.0 / p_));
    while ((*this)(hi) < y) hi *= 2.0;
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double v = (*this)(t) - y;
        if (v == 0.0) return t;
        (v > 0.0 ? hi : lo) = t;
        const double e = std::numbers::e + t;
        const double slope = p_ * std::pow(t, p_ - 1.0) * std::log(e) + std::pow(t, p_) / e;
        double next = t - v / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-16 * std::max(1.0, t)) return next;
        t = next;
    }
    return t;
}

double YoungFunction::delta2_p1() const { return kind_ == YoungKind::power ? p_ : p_ + 1.0; }

double YoungFunction::delta2_constant(double lo, double hi, int samples) const {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
        worst = std::max(worst, (*this)(2.0 * t) / (*this)(t));
    }
    return worst;
}

double luxemburg_norm(const ScalarField& field, const Weight& weight, const CellSet& region, const YoungFunction& phi,
                      const LorentzParams& params, int lambda_quadrature) {
    double fmax = 0.0;
    for (std::size_t k : region) fmax = std::max(fmax, std::abs(field[k]));
    if (fmax == 0.0) return 0.0;

    ScalarField scaled(field.grid);
    const auto modular = [&](double t) {
        for (std::size_t k : region) scaled[k] = phi(std::abs(field[k]) / t);
        return lorentz_norm(scaled, weight, region, params, lambda_quadrature);
    };

    // t -> modular(t) is non-increasing; bracket geometrically around max|f|.
    double lo = fmax, hi = fmax;
    for (int i = 0; modular(hi) > 1.0; ++i) {
        require(i < 200, "luxemburg: bracket failure (upper end)");
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; lo == hi || modular(lo) <= 1.0; ++i) {
        require(i < 200, "luxemburg: bracket failure (lower end)");
        hi = lo;
        lo *= 0.5;
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = std::sqrt(lo * hi);
        (modular(mid) > 1.0 ? lo : hi) = mid;
    }
    return hi;
}

double estimate_fund_constant(double p, double epsilon, int samples, std::uint64_t seed) {
    require(p > 1.0, "fund: p must exceed 1");
    require(epsilon > 0.0 && epsilon < 1.0, "fund: epsilon must lie in (0, 1)");
    require(samples >= 10000, "fund: need at least 1e4 samples");
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        // The inequality is p-homogeneous in the pair, so |g1| = 1 is enough.
        const double t1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double t2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r2 = std::pow(10.0, rng.uniform(-6.0, 6.0));
        const double g1x = std::cos(t1), g1y = std::sin(t1);
        const double g2x = r2 * std::cos(t2), g2y = r2 * std::sin(t2);
        const double d = std::hypot(g1x - g2x, g1y - g2y);
        if (!(d > 0.0)) continue;
        const double num = std::pow(d, p) - epsilon;
        const double den = std::pow(1.0 + r2, p - 2.0) * d * d;
        worst = std::max(worst, num / den);
    }
    return worst;
}

} // namespace reglab
