#pragma once

#include "reglab/field.hpp"
#include "reglab/geometry.hpp"
#include "reglab/weights.hpp"

#include <optional>
#include <span>
#include <vector>

namespace reglab {

/// Radii 2h, 4h, ... up to the grid diagonal.
struct RadiusFamily {
    std::vector<double> radii;
};

RadiusFamily dyadic_radii(const Grid& grid);

enum class MaximalMode { brute, fast };

/// M_alpha f at every node: max over the family of r^alpha times the mean of
/// |f| over the node-centred disk. f is extended by zero outside the grid, so
/// the mean divides by the full lattice-disk count.
ScalarField frac_maximal(const ScalarField& field, double alpha, const RadiusFamily& radii,
                         MaximalMode mode = MaximalMode::fast);

/// Mean of |f| over the open disk, zero extension, at an arbitrary centre.
double ball_average(const ScalarField& field, const Ball& ball);

/// M_alpha f at an arbitrary point.
double frac_maximal_at(const ScalarField& field, double alpha, const RadiusFamily& radii, Point at);

/// I_beta f at every node, kernel max(d, h/2)^(beta-2).
ScalarField riesz_potential(const ScalarField& field, double beta);
double riesz_at(const ScalarField& field, double beta, Point at);

/// omega({x in Omega, x in ball : |f(x)| > lambda}).
double distribution(const ScalarField& field, const Weight& weight, const Domain& domain,
                    const std::optional<Ball>& ball, double lambda);

struct WeakTypeResult {
    double lhs = 0.0;
    double rhs_base = 0.0;
};

WeakTypeResult weak_type_check(const ScalarField& field, double alpha, double s, double lambda);
/// Same, over a sweep, reusing one evaluation of M_alpha f.
std::vector<WeakTypeResult> weak_type_sweep(const ScalarField& field, double alpha, double s,
                                            std::span<const double> lambdas);

struct LocalizationResult {
    double restricted_sup = 0.0;
    double bound = 0.0;
    double slack = 1.0; ///< 1 + 5h/rho
    bool holds() const { return restricted_sup <= bound * slack; }
};

LocalizationResult localization_check(const ScalarField& field, double alpha, Point xi2, Point zeta, double rho);

} // namespace reglab
