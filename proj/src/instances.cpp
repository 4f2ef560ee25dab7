#include "reglab/instances.hpp"

#include "reglab/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace reglab {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double v) { return v * v; }

} // namespace

Domain build_domain(const InstanceSpec& spec) {
    const Grid grid = build_grid(spec.grid, 1.0);
    return make_domain(grid, spec.domain, spec.domain == DomainKind::square ? 0.0 : spec.delta, spec.r0, spec.seed,
                       spec.finest_scale);
}

double boundary_height(const InstanceSpec& spec, double x1) {
    if (spec.domain == DomainKind::square) return 0.0;
    const double h = 1.0 / spec.grid;
    return reifenberg_profile(x1, 1.0, spec.delta, spec.r0, std::max(spec.finest_scale, 2.0 * h), spec.seed);
}

ProblemSpec build_problem(const InstanceSpec& spec) {
    const Domain domain = build_domain(spec);
    const Grid& grid = domain.grid;

    std::function<double(Point)> a;
    switch (spec.coefficient) {
    case CoefficientModel::constant: a = [](Point) { return 1.0; }; break;
    case CoefficientModel::x1_layers:
        // Piecewise constant in x1 only.
        a = [](Point x) { return static_cast<int>(std::floor(4.0 * x.x)) % 2 == 0 ? 1.0 : 1.5; };
        break;
    case CoefficientModel::x2_osc: a = [](Point x) { return 1.0 + 0.1 * std::sin(2.0 * kPi * x.y); }; break;
    }
    const CoefficientField coeff = make_coefficient(grid, spec.p, a, [](Point) { return 1.0; });

    Rng rng(spec.seed * 7919 + 17);
    const double ph1 = rng.uniform(0.0, 2.0 * kPi), ph2 = rng.uniform(0.0, 2.0 * kPi);
    const double amp = spec.F_amplitude;
    const VectorField F = sample(grid, [&](Point x) {
        return Point{amp * std::cos(kPi * x.x + ph1) * std::sin(2.0 * kPi * x.y),
                     amp * std::sin(2.0 * kPi * x.x) * std::cos(kPi * x.y + ph2)};
    });
    const ScalarField g(grid, spec.g_value);

    ScalarField psi1(grid), psi2(grid);
    switch (spec.obstacles) {
    case ObstacleModel::inactive:
        psi1 = ScalarField(grid, -10.0);
        psi2 = ScalarField(grid, 10.0);
        break;
    case ObstacleModel::active:
        psi1 = sample(grid, [](Point x) { return 0.05 - 2.0 * (sq(x.x - 0.3) + sq(x.y - 0.7)); });
        psi2 = sample(grid, [](Point x) { return 0.03 + 0.5 * (sq(x.x - 0.5) + sq(x.y - 0.5)); });
        break;
    case ObstacleModel::pinched: {
        // Vanishes on the whole physical boundary, including a rough lower edge.
        const ScalarField psi = sample(grid, [&](Point x) {
            const double y0 = boundary_height(spec, x.x);
            const double s = x.y > y0 ? (x.y - y0) / (1.0 - y0) : 0.0;
            return 0.1 * std::sin(kPi * x.x) * std::sin(kPi * s) * (1.0 + 0.5 * std::cos(2.0 * kPi * x.x));
        });
        psi1 = restrict_to(psi, domain);
        psi2 = psi1;
        break;
    }
    }
    return ProblemSpec{domain, spec.p, coeff, F, g, psi1, psi2};
}

Weight build_weight(const Grid& grid, double gamma, std::uint64_t seed) {
    Weight w = gamma == 0.0 ? constant_weight(grid) : power_weight(grid, {0.5, 0.5}, gamma);
    const Point centers[] = {{0.5, 0.5}, {0.3, 0.6}, {0.7, 0.35}};
    const auto balls = dyadic_ball_family(centers, 4.0 * grid.spacing(), 0.5);
    estimate_Ainf(w, balls, 32, seed);
    return w;
}

std::string to_string(CoefficientModel m) {
    switch (m) {
    case CoefficientModel::constant: return "constant";
    case CoefficientModel::x1_layers: return "x1_layers";
    case CoefficientModel::x2_osc: return "x2_osc";
    }
    return "?";
}

std::string to_string(ObstacleModel m) {
    switch (m) {
    case ObstacleModel::inactive: return "inactive";
    case ObstacleModel::active: return "active";
    case ObstacleModel::pinched: return "pinched";
    }
    return "?";
}

std::string to_string(DomainKind k) {
    switch (k) {
    case DomainKind::square: return "square";
    case DomainKind::reifenberg: return "reifenberg";
    case DomainKind::mask: return "mask";
    }
    return "?";
}

CoefficientModel parse_coefficient(const std::string& s) {
    if (s == "constant") return CoefficientModel::constant;
    if (s == "x1_layers") return CoefficientModel::x1_layers;
    if (s == "x2_osc") return CoefficientModel::x2_osc;
    throw Error("unknown coefficient model '" + s + "' (constant, x1_layers, x2_osc)");
}

ObstacleModel parse_obstacles(const std::string& s) {
    if (s == "inactive") return ObstacleModel::inactive;
    if (s == "active") return ObstacleModel::active;
    if (s == "pinched") return ObstacleModel::pinched;
    throw Error("unknown obstacle model '" + s + "' (inactive, active, pinched)");
}

DomainKind parse_domain(const std::string& s) {
    if (s == "square") return DomainKind::square;
    if (s == "reifenberg") return DomainKind::reifenberg;
    throw Error("unknown domain kind '" + s + "' (square, reifenberg)");
}

} // namespace reglab
