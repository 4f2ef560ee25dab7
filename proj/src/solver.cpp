#include "reglab/solver.hpp"

#include "reglab/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace reglab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t triangle_count(const Grid& g) { return 2 * static_cast<std::size_t>(g.cells()) * g.cells(); }

std::array<std::size_t, 3> vertices(const Grid& g, std::size_t t) {
    const std::size_t cell = t / 2;
    const int i = static_cast<int>(cell % g.cells()), j = static_cast<int>(cell / g.cells());
    if (t % 2 == 0) return {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1)};
    return {g.index(i, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
}

Point tri_gradient(std::size_t t, const std::array<std::size_t, 3>& v, const std::vector<double>& u, double h) {
    if (t % 2 == 0) return {(u[v[1]] - u[v[0]]) / h, (u[v[2]] - u[v[1]]) / h};
    return {(u[v[1]] - u[v[2]]) / h, (u[v[2]] - u[v[0]]) / h};
}

// Adds the action of a triangle flux phi on the nodal gradient:
// d/du_i of phi . grad_T u.
void scatter(std::size_t t, const std::array<std::size_t, 3>& v, Point phi, double h, std::vector<double>& out) {
    if (t % 2 == 0) {
        out[v[0]] -= phi.x / h;
        out[v[1]] += (phi.x - phi.y) / h;
        out[v[2]] += phi.y / h;
    } else {
        out[v[0]] -= phi.y / h;
        out[v[1]] += phi.x / h;
        out[v[2]] += (phi.y - phi.x) / h;
    }
}

// Minimization task: J(u) = sum_T |T| [a_T ((|g|^2+mu^2)^{p/2} - mu^p)/p - G_T . g]
// - sum_i load_i u_i over lower <= u <= upper on the free nodes, with
// G_T = c_T (|V_T|^2 + mu^2)^{(p-2)/2} V_T.
struct Task {
    Grid grid{4, 1.0};
    double p = 2.0;
    std::vector<double> a_tri;
    std::vector<double> flux_c, flux_vx, flux_vy;
    std::vector<double> load;
    std::vector<double> lower, upper;
    std::vector<double> u0;
    std::vector<std::size_t> free_nodes;
    std::vector<std::size_t> tris;
    std::vector<std::array<std::size_t, 3>> verts;
};

class Evaluator {
public:
    Evaluator(const Task& task, double mu) : task_(task), mu_(mu), h_(task.grid.spacing()), area_(0.5 * h_ * h_) {
        const std::size_t m = task.tris.size();
        G_.assign(m, Point{});
        if (!task.flux_c.empty()) {
            for (std::size_t q = 0; q < m; ++q) {
                const std::size_t t = task.tris[q];
                const double vx = task.flux_vx[t], vy = task.flux_vy[t];
                const double s = task.p == 2.0 ? 1.0 : std::pow(vx * vx + vy * vy + mu * mu, 0.5 * (task.p - 2.0));
                G_[q] = {task.flux_c[t] * s * vx, task.flux_c[t] * s * vy};
            }
        }
        mu_p_ = task.p == 2.0 ? mu * mu : std::pow(mu, task.p);
    }

    double energy(const std::vector<double>& u) const {
        const double p = task_.p;
        double J = 0.0;
        for (std::size_t q = 0; q < task_.tris.size(); ++q) {
            const std::size_t t = task_.tris[q];
            const Point g = tri_gradient(t, task_.verts[q], u, h_);
            const double r = g.x * g.x + g.y * g.y + mu_ * mu_;
            const double phi = p == 2.0 ? r - mu_p_ : std::pow(r, 0.5 * p) - mu_p_;
            J += area_ * (task_.a_tri[t] * phi / p - (G_[q].x * g.x + G_[q].y * g.y));
        }
        if (!task_.load.empty())
            for (std::size_t k : task_.free_nodes) J -= task_.load[k] * u[k];
        return J;
    }

    // J(w) - J(u), evaluated triangle-wise to avoid cancellation.
    double energy_difference(const std::vector<double>& u, const std::vector<double>& w) const {
        const double p = task_.p, mu2 = mu_ * mu_;
        double dJ = 0.0;
        for (std::size_t q = 0; q < task_.tris.size(); ++q) {
            const std::size_t t = task_.tris[q];
            const Point go = tri_gradient(t, task_.verts[q], u, h_);
            const Point gn = tri_gradient(t, task_.verts[q], w, h_);
            const double dx = gn.x - go.x, dy = gn.y - go.y;
            if (dx == 0.0 && dy == 0.0) continue;
            const double dr = dx * (gn.x + go.x) + dy * (gn.y + go.y);
            const double A = go.x * go.x + go.y * go.y + mu2;
            double dphi;
            if (p == 2.0) dphi = dr;
            else if (A > 0.0) dphi = std::pow(A, 0.5 * p) * std::expm1(0.5 * p * std::log1p(dr / A));
            else dphi = std::pow(gn.x * gn.x + gn.y * gn.y + mu2, 0.5 * p);
            dJ += area_ * (task_.a_tri[t] * dphi / p - (G_[q].x * dx + G_[q].y * dy));
        }
        if (!task_.load.empty())
            for (std::size_t k : task_.free_nodes) dJ -= task_.load[k] * (w[k] - u[k]);
        return dJ;
    }

    // Full nodal gradient; only free entries are meaningful.
    void gradient(const std::vector<double>& u, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        const double p = task_.p, mu2 = mu_ * mu_;
        for (std::size_t q = 0; q < task_.tris.size(); ++q) {
            const std::size_t t = task_.tris[q];
            const Point g = tri_gradient(t, task_.verts[q], u, h_);
            const double s = p == 2.0 ? 1.0 : std::pow(g.x * g.x + g.y * g.y + mu2, 0.5 * (p - 2.0));
            const double c = task_.a_tri[t] * s;
            scatter(t, task_.verts[q], {area_ * (c * g.x - G_[q].x), area_ * (c * g.y - G_[q].y)}, h_, out);
        }
        if (!task_.load.empty())
            for (std::size_t k : task_.free_nodes) out[k] -= task_.load[k];
    }

    double residual(const std::vector<double>& u, const std::vector<double>& grad) const {
        const double tau = h_ * h_;
        double sum = 0.0;
        for (std::size_t k : task_.free_nodes) {
            const double d = u[k] - std::clamp(u[k] - tau * grad[k], task_.lower[k], task_.upper[k]);
            sum += d * d;
        }
        return std::sqrt(sum) / tau;
    }

private:
    const Task& task_;
    double mu_;
    double mu_p_;
    double h_;
    double area_;
    std::vector<Point> G_;
};

struct StageResult {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    bool stagnated = false;
};

StageResult descend(const Task& task, double mu, double tol, int max_iter, const SolverConfig& cfg,
                    std::vector<double>& u, std::vector<double>* trace) {
    const Evaluator ev(task, mu);
    const std::size_t N = u.size();
    std::vector<double> grad(N), grad_new(N), trial(u);
    ev.gradient(u, grad);
    StageResult res;
    res.residual = ev.residual(u, grad);
    if (trace) trace->push_back(ev.energy(u));

    double a_max = 0.0;
    for (std::size_t t : task.tris) a_max = std::max(a_max, task.a_tri[t]);
    double step = 1.0 / (8.0 * std::max(a_max, 1e-300));

    while (res.residual > tol) {
        if (res.iterations >= max_iter) return res;
        double t = step;
        double dJ = 0.0;
        bool moved = false;
        for (;;) {
            double slope = 0.0;
            moved = false;
            for (std::size_t k : task.free_nodes) {
                trial[k] = std::clamp(u[k] - t * grad[k], task.lower[k], task.upper[k]);
                slope += grad[k] * (trial[k] - u[k]);
                moved = moved || trial[k] != u[k];
            }
            if (!moved) break;
            dJ = ev.energy_difference(u, trial);
            if (dJ <= cfg.armijo_slope * slope) break;
            t *= cfg.armijo_factor;
        }
        if (!moved) {
            res.stagnated = true;
            return res;
        }
        ev.gradient(trial, grad_new);
        double ss = 0.0, sy = 0.0;
        for (std::size_t k : task.free_nodes) {
            const double s = trial[k] - u[k], y = grad_new[k] - grad[k];
            ss += s * s;
            sy += s * y;
        }
        step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 2.0 * t;
        for (std::size_t k : task.free_nodes) u[k] = trial[k];
        grad.swap(grad_new);
        ++res.iterations;
        if (trace) trace->push_back(trace->back() + dJ);
        res.residual = ev.residual(u, grad);
    }
    res.converged = true;
    return res;
}

Solution run(const Task& task, const SolverConfig& cfg) {
    require(cfg.tol > 0.0 && cfg.mu >= 0.0 && cfg.max_iter >= 0, "solver: invalid configuration");
    Solution sol{ScalarField(task.grid, task.u0), {}, VectorField(task.grid), 0, 0.0, {}, {}, {}, false, false};
    std::vector<double>& u = sol.u.values;
    for (std::size_t k : task.free_nodes) u[k] = std::clamp(u[k], task.lower[k], task.upper[k]);

    const double final_mu = task.p == 2.0 ? 0.0 : cfg.mu;
    std::vector<double> stages;
    if (task.p != 2.0) {
        // Warm start: skip continuation when the initial guess already passes the final test.
        const Evaluator ev(task, final_mu);
        std::vector<double> grad(u.size());
        ev.gradient(u, grad);
        if (ev.residual(u, grad) > cfg.tol)
            for (double mu = 1e-2; mu > final_mu * 1.0001; mu *= 1e-2) stages.push_back(mu);
    }
    stages.push_back(final_mu);

    int budget = cfg.max_iter;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const bool last = s + 1 == stages.size();
        const double tol = last ? cfg.tol : std::max(cfg.tol, 1e-4);
        if (last) sol.energy_trace.clear();
        const StageResult r = descend(task, stages[s], tol, budget, cfg, u, last ? &sol.energy_trace : nullptr);
        sol.iterations += r.iterations;
        budget -= r.iterations;
        if (last) {
            sol.kkt_residual = r.residual;
            sol.converged = r.converged;
            sol.stagnated = r.stagnated;
        }
    }
    sol.grad_tri = triangle_gradients(task.grid, u);
    sol.grad_u = node_gradients(task.grid, sol.grad_tri);
    for (std::size_t k : task.free_nodes) {
        if (u[k] == task.lower[k]) sol.active_lower.push_back(k);
        if (u[k] == task.upper[k]) sol.active_upper.push_back(k);
    }
    return sol;
}

void collect_triangles(Task& task, const std::vector<std::uint8_t>& free) {
    const Grid& g = task.grid;
    for (std::size_t t = 0; t < triangle_count(g); ++t) {
        const auto v = vertices(g, t);
        if (free[v[0]] || free[v[1]] || free[v[2]]) {
            task.tris.push_back(t);
            task.verts.push_back(v);
        }
    }
    for (std::size_t k = 0; k < free.size(); ++k)
        if (free[k]) task.free_nodes.push_back(k);
}

// A(x, grad psi) on each triangle as a flux source.
void flux_from(Task& task, const DiscreteProblem& dp, const ScalarField& psi) {
    const TriangleGradients tg = triangle_gradients(dp.spec.domain.grid, psi.values);
    task.flux_c = task.a_tri;
    task.flux_vx = tg.x;
    task.flux_vy = tg.y;
}

Task local_task(const DiscreteProblem& dp, const CellSet& region, const ScalarField& boundary_data) {
    const Domain& dom = dp.spec.domain;
    require(boundary_data.grid == dom.grid, "solver: boundary data grid mismatch");
    Task task;
    task.grid = dom.grid;
    task.p = dp.spec.p;
    task.a_tri = dp.a_tri;
    task.lower.assign(dom.grid.node_count(), -kInf);
    task.upper.assign(dom.grid.node_count(), kInf);
    task.u0 = boundary_data.values;
    std::vector<std::uint8_t> free(dom.grid.node_count(), 0);
    for (std::size_t k : region)
        if (dom.is_interior(k)) free[k] = 1;
    require(std::count(free.begin(), free.end(), std::uint8_t{1}) > 0, "solver: region has no free nodes");
    collect_triangles(task, free);
    return task;
}

} // namespace

TriangleGradients triangle_gradients(const Grid& grid, const std::vector<double>& u) {
    const std::size_t T = triangle_count(grid);
    TriangleGradients out{std::vector<double>(T), std::vector<double>(T)};
    for (std::size_t t = 0; t < T; ++t) {
        const Point g = tri_gradient(t, vertices(grid, t), u, grid.spacing());
        out.x[t] = g.x;
        out.y[t] = g.y;
    }
    return out;
}

VectorField node_gradients(const Grid& grid, const TriangleGradients& tri) {
    VectorField out(grid);
    std::vector<int> count(grid.node_count(), 0);
    for (std::size_t t = 0; t < tri.x.size(); ++t) {
        for (std::size_t k : vertices(grid, t)) {
            out.x[k] += tri.x[t];
            out.y[k] += tri.y[t];
            ++count[k];
        }
    }
    for (std::size_t k = 0; k < count.size(); ++k) {
        out.x[k] /= count[k];
        out.y[k] /= count[k];
    }
    return out;
}

VectorField node_gradients(const ScalarField& u) {
    return node_gradients(u.grid, triangle_gradients(u.grid, u.values));
}

ScalarField composite_datum(const ProblemSpec& pr) {
    const Grid& g = pr.domain.grid;
    const double p = pr.p;
    const VectorField d1 = node_gradients(pr.psi1), d2 = node_gradients(pr.psi2);
    ScalarField out(g);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double s = std::pow(std::hypot(d1.x[k], d1.y[k]), p) + std::pow(std::hypot(d2.x[k], d2.y[k]), p) +
                         std::pow(std::hypot(pr.F.x[k], pr.F.y[k]), p) + std::pow(std::abs(pr.g[k]), p / (p - 1.0));
        out[k] = std::pow(s, 1.0 / p);
    }
    return out;
}

DiscreteProblem assemble(const ProblemSpec& problem) {
    const Domain& dom = problem.domain;
    const Grid& g = dom.grid;
    require(problem.p > 1.0 && std::isfinite(problem.p), "assemble: p must lie in (1, inf)");
    require(problem.coeff.grid == g && problem.F.grid == g && problem.g.grid == g && problem.psi1.grid == g &&
                problem.psi2.grid == g,
            "assemble: field grids differ from the domain grid");
    require(problem.coeff.p == problem.p, "assemble: coefficient p differs from problem p");
    for (std::size_t k = 0; k < g.node_count(); ++k)
        require(problem.psi1[k] <= problem.psi2[k], "assemble: psi1 > psi2 at node " + std::to_string(k));
    for (std::size_t k : dom.boundary_nodes)
        require(problem.psi1[k] <= 0.0 && problem.psi2[k] >= 0.0,
                "assemble: obstacles must satisfy psi1 <= 0 <= psi2 on the boundary");

    DiscreteProblem dp{problem, {}, {}, {}, {}};
    const std::size_t T = triangle_count(g);
    dp.a_tri.resize(T);
    dp.b_tri.resize(T);
    dp.Fx_tri.resize(T);
    dp.Fy_tri.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto v = vertices(g, t);
        const auto mean = [&](const std::vector<double>& f) { return (f[v[0]] + f[v[1]] + f[v[2]]) / 3.0; };
        dp.a_tri[t] = mean(problem.coeff.a);
        dp.b_tri[t] = mean(problem.coeff.b);
        dp.Fx_tri[t] = mean(problem.F.x);
        dp.Fy_tri[t] = mean(problem.F.y);
    }
    return dp;
}

namespace {

Task double_obstacle_task(const DiscreteProblem& dp) {
    const ProblemSpec& s = dp.spec;
    const Grid& g = s.domain.grid;
    Task task;
    task.grid = g;
    task.p = s.p;
    task.a_tri = dp.a_tri;
    task.flux_c = dp.b_tri;
    task.flux_vx = dp.Fx_tri;
    task.flux_vy = dp.Fy_tri;
    const double h2 = g.spacing() * g.spacing();
    task.load.resize(g.node_count());
    for (std::size_t k = 0; k < g.node_count(); ++k) task.load[k] = h2 * s.g[k];
    task.lower = s.psi1.values;
    task.upper = s.psi2.values;
    task.u0.assign(g.node_count(), 0.0);
    collect_triangles(task, s.domain.interior);
    return task;
}

} // namespace

Solution solve_double_obstacle(const DiscreteProblem& problem, const SolverConfig& config) {
    return run(double_obstacle_task(problem), config);
}

Solution solve_one_obstacle(const DiscreteProblem& problem, const CellSet& region, const ScalarField& boundary_data,
                            const ScalarField& lower, OneObstacleRhs rhs, const SolverConfig& config) {
    Task task = local_task(problem, region, boundary_data);
    const Grid& g = task.grid;
    std::vector<std::uint8_t> free(g.node_count(), 0);
    for (std::size_t k : task.free_nodes) free[k] = 1;
    // Fixed nodes touching the free set must already be admissible.
    for (const auto& v : task.verts)
        for (std::size_t k : v)
            if (!free[k] && problem.spec.domain.is_interior(k))
                require(boundary_data[k] >= lower[k], "one obstacle: boundary data below the obstacle");
    for (std::size_t k : task.free_nodes) task.lower[k] = lower[k];
    if (rhs == OneObstacleRhs::div_A_psi2) flux_from(task, problem, problem.spec.psi2);
    return run(task, config);
}

Solution solve_dirichlet(const DiscreteProblem& problem, const CellSet& region, const ScalarField& boundary_data,
                         DirichletRhs rhs, const SolverConfig& config) {
    require(!region.empty(), "dirichlet: empty region");
    Task task = local_task(problem, region, boundary_data);
    if (rhs == DirichletRhs::div_A_psi1) flux_from(task, problem, problem.spec.psi1);
    return run(task, config);
}

CoefficientField frozen_coefficient(const CoefficientField& coeff, const CellSet& region) {
    require(!region.empty(), "frozen: empty region");
    const Grid& g = coeff.grid;
    int lo = g.nodes_per_side(), hi = -1;
    for (std::size_t k : region) {
        lo = std::min(lo, g.row(k));
        hi = std::max(hi, g.row(k));
    }
    require(hi - lo >= 2, "frozen: degenerate slice (width < 2h)");
    CoefficientField out = coeff;
    for (int i = 0; i < g.nodes_per_side(); ++i) {
        const double abar = column_average(g, coeff.a, i, lo, hi);
        for (int j = 0; j < g.nodes_per_side(); ++j) out.a[g.index(i, j)] = abar;
    }
    return out;
}

Solution solve_frozen(const DiscreteProblem& problem, const CellSet& region, const ScalarField& boundary_data,
                      const SolverConfig& config) {
    ProblemSpec spec = problem.spec;
    spec.coeff = frozen_coefficient(problem.spec.coeff, region);
    const DiscreteProblem frozen = assemble(spec);
    return solve_dirichlet(frozen, region, boundary_data, DirichletRhs::zero, config);
}

double kkt_residual(const ScalarField& u, const DiscreteProblem& problem, const SolverConfig& config) {
    const Task task = double_obstacle_task(problem);
    const Evaluator ev(task, problem.spec.p == 2.0 ? 0.0 : config.mu);
    std::vector<double> grad(u.size());
    ev.gradient(u.values, grad);
    return ev.residual(u.values, grad);
}

double kkt_residual(const Solution& solution, const DiscreteProblem& problem, const SolverConfig& config) {
    return kkt_residual(solution.u, problem, config);
}

double energy(const DiscreteProblem& problem, const ScalarField& u, double mu) {
    const Task task = double_obstacle_task(problem);
    return Evaluator(task, mu).energy(u.values);
}

} // namespace reglab
