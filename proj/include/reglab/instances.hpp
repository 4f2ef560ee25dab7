#pragma once

#include "reglab/solver.hpp"
#include "reglab/weights.hpp"

#include <cstdint>
#include <string>

namespace reglab {

enum class CoefficientModel { constant, x1_layers, x2_osc };
enum class ObstacleModel { inactive, active, pinched };

/// Resolution-independent description of a test instance on the unit square.
struct InstanceSpec {
    std::string id = "i0";
    int grid = 32;
    double p = 2.0;
    double gamma = 0.0;
    CoefficientModel coefficient = CoefficientModel::constant;
    double F_amplitude = 0.0;
    double g_value = 1.0;
    ObstacleModel obstacles = ObstacleModel::inactive;
    DomainKind domain = DomainKind::square;
    double delta = 0.1;
    double r0 = 0.5;
    /// Smallest oscillation scale of the rough profile; fixed so that a
    /// refinement pair discretizes the same domain.
    double finest_scale = 1.0 / 16.0;
    std::uint64_t seed = 1;
};

ProblemSpec build_problem(const InstanceSpec& spec);
Domain build_domain(const InstanceSpec& spec);

/// Height of the lower physical boundary above x1 (0 for the square).
double boundary_height(const InstanceSpec& spec, double x1);

/// Power weight centred at (0.5, 0.5), with a fitted A_infinity pair.
Weight build_weight(const Grid& grid, double gamma, std::uint64_t seed);

std::string to_string(CoefficientModel m);
std::string to_string(ObstacleModel m);
std::string to_string(DomainKind k);
CoefficientModel parse_coefficient(const std::string& s);
ObstacleModel parse_obstacles(const std::string& s);
DomainKind parse_domain(const std::string& s);

} // namespace reglab
