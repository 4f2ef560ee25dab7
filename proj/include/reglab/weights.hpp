#pragma once

#include "reglab/field.hpp"
#include "reglab/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace reglab {

enum class WeightKind { constant, power };

/// Pair (c0, nu) with w(K) <= c0 (|K|/|B|)^nu w(B) for K inside B.
struct AinfPair {
    double c0 = 1.0;
    double nu = 1.0;
};

struct Weight {
    Grid grid;
    std::vector<double> values;
    WeightKind kind = WeightKind::constant;
    Point center{};
    double gamma = 0.0;
    std::optional<AinfPair> a_inf;
};

Weight constant_weight(const Grid& grid, double value = 1.0);

/// values = max(|x - center|, h/2)^gamma.
Weight power_weight(const Grid& grid, Point center, double gamma);

/// Sum of weight values times h^2 over the cells, in the order given.
double weighted_measure(const Weight& weight, const CellSet& cells);

/// Balls centred at each of `centers` with radii r_min, 2 r_min, ... <= r_max.
std::vector<Ball> dyadic_ball_family(std::span<const Point> centers, double r_min, double r_max);

/// Maximum of the A_p product over the ball family.
double estimate_Ap(const Weight& weight, double p, std::span<const Ball> balls);

struct AinfSample {
    double measure_ratio = 0.0; ///< |K| / |B|
    double weight_ratio = 0.0;  ///< w(K) / w(B)
};

/// Random subsets K (unions of 1-4 sub-balls, clipped to B) of every ball.
std::vector<AinfSample> sample_ainf(const Weight& weight, std::span<const Ball> balls, int subsets_per_ball,
                                    std::uint64_t seed);

/// Log-log least-squares slope clipped to (0,1], then c0 raised to the envelope.
AinfPair fit_ainf(std::span<const AinfSample> samples);

/// Fraction of samples satisfying the A_infinity envelope of `pair`.
double ainf_envelope_coverage(const AinfPair& pair, std::span<const AinfSample> samples);

/// Samples, fits and stores the pair on the weight.
AinfPair estimate_Ainf(Weight& weight, std::span<const Ball> balls, int subsets_per_ball, std::uint64_t seed);

/// Coefficients of A(x, xi) = a(x)|xi|^{p-2} xi and B(x, z) = b(x)|z|^{p-2} z.
struct CoefficientField {
    Grid grid;
    std::vector<double> a;
    std::vector<double> b;
    double p = 2.0;
    double L = 1.0;
    int measurable_axis = 0; ///< x1, the column coordinate
};

/// Samples a and b; L = max(sup a, 1/inf a, sup |b|).
CoefficientField make_coefficient(const Grid& grid, double p, const std::function<double(Point)>& a,
                                  const std::function<double(Point)>& b);

/// Mean of a over column `column`, rows [row_lo, row_hi]. Exact when the
/// column is constant over that range.
double column_average(const Grid& grid, std::span<const double> a, int column, int row_lo, int row_hi);

/// sup over centres and dyadic radii <= r0 of the ball average of theta_1.
double partial_bmo_seminorm(const CoefficientField& coeff, double r0, int probe_directions);

} // namespace reglab
