#pragma once

#include "reglab/field.hpp"
#include "reglab/geometry.hpp"
#include "reglab/weights.hpp"

#include <vector>

namespace reglab {

/// Double-obstacle instance: A(x, xi) = a|xi|^{p-2}xi, B(x, z) = b|z|^{p-2}z.
struct ProblemSpec {
    Domain domain;
    double p = 2.0;
    CoefficientField coeff;
    VectorField F;
    ScalarField g;
    ScalarField psi1;
    ScalarField psi2;
};

/// (|grad psi1|^p + |grad psi2|^p + |F|^p + |g|^{p/(p-1)})^{1/p}, node-averaged gradients.
ScalarField composite_datum(const ProblemSpec& problem);

struct SolverConfig {
    double tol = 1e-8;
    int max_iter = 20000;
    double mu = 1e-8;
    double armijo_factor = 0.5;
    double armijo_slope = 1e-4;
};

/// Per-triangle data on the two-triangles-per-square P1 mesh. Triangle
/// t = 2 * (j * n + i) + k of cell (i, j); k = 0 has vertices (i,j), (i+1,j),
/// (i+1,j+1), k = 1 has (i,j), (i+1,j+1), (i,j+1).
struct DiscreteProblem {
    ProblemSpec spec;
    std::vector<double> a_tri;
    std::vector<double> b_tri;
    std::vector<double> Fx_tri;
    std::vector<double> Fy_tri;
};

DiscreteProblem assemble(const ProblemSpec& problem);

struct TriangleGradients {
    std::vector<double> x;
    std::vector<double> y;
};

/// Exact P1 gradient of the nodal interpolant on every triangle.
TriangleGradients triangle_gradients(const Grid& grid, const std::vector<double>& u);
/// Mean of the gradients of the triangles sharing each node.
VectorField node_gradients(const Grid& grid, const TriangleGradients& tri);
VectorField node_gradients(const ScalarField& u);

struct Solution {
    ScalarField u;
    TriangleGradients grad_tri;
    VectorField grad_u; ///< node-averaged
    int iterations = 0;
    double kkt_residual = 0.0;
    std::vector<double> energy_trace;
    std::vector<std::size_t> active_lower;
    std::vector<std::size_t> active_upper;
    bool converged = false;
    bool stagnated = false;
};

Solution solve_double_obstacle(const DiscreteProblem& problem, const SolverConfig& config = {});

enum class OneObstacleRhs { div_A_psi2 };
enum class DirichletRhs { zero, div_A_psi1 };

/// u >= lower on the free nodes (region inside Omega), u = boundary_data elsewhere.
Solution solve_one_obstacle(const DiscreteProblem& problem, const CellSet& region, const ScalarField& boundary_data,
                            const ScalarField& lower, OneObstacleRhs rhs = OneObstacleRhs::div_A_psi2,
                            const SolverConfig& config = {});

Solution solve_dirichlet(const DiscreteProblem& problem, const CellSet& region, const ScalarField& boundary_data,
                         DirichletRhs rhs, const SolverConfig& config = {});

/// Coefficient a replaced by its x2-average over the rows spanned by the region.
CoefficientField frozen_coefficient(const CoefficientField& coeff, const CellSet& region);

Solution solve_frozen(const DiscreteProblem& problem, const CellSet& region, const ScalarField& boundary_data,
                      const SolverConfig& config = {});

/// ||u - P_K(u - h^2 grad J(u))||_2 / h^2 for the double-obstacle energy at the final mu.
double kkt_residual(const Solution& solution, const DiscreteProblem& problem, const SolverConfig& config = {});
double kkt_residual(const ScalarField& u, const DiscreteProblem& problem, const SolverConfig& config = {});

/// J(u) of the double-obstacle problem at regularization mu.
double energy(const DiscreteProblem& problem, const ScalarField& u, double mu);

} // namespace reglab
