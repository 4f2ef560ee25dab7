#include <doctest.h>

#include "reglab/common.hpp"
#include "reglab/instances.hpp"
#include "reglab/reference.hpp"
#include "reglab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>

using namespace reglab;

namespace {

double series(Point x) {
    const double pi = std::numbers::pi;
    double u = 0.0;
    for (int m = 1; m <= 201; m += 2)
        for (int n = 1; n <= 201; n += 2)
            u += 16.0 / (std::pow(pi, 4) * m * n * (m * m + n * n)) * std::sin(m * pi * x.x) * std::sin(n * pi * x.y);
    return u;
}

InstanceSpec spec(int grid, double p) {
    InstanceSpec s;
    s.grid = grid;
    s.p = p;
    return s;
}

} // namespace

TEST_CASE("P1 gradients of a linear function are exact") {
    const Grid g = build_grid(8, 1.0);
    const ScalarField u = sample(g, [](Point x) { return 0.3 - 1.7 * x.x + 2.2 * x.y; });
    const TriangleGradients tg = triangle_gradients(g, u.values);
    REQUIRE(tg.x.size() == 2u * 64u);
    for (std::size_t t = 0; t < tg.x.size(); ++t) {
        CHECK(tg.x[t] == doctest::Approx(-1.7).epsilon(1e-12));
        CHECK(tg.y[t] == doctest::Approx(2.2).epsilon(1e-12));
    }
    const VectorField ng = node_gradients(u);
    for (std::size_t k = 0; k < g.node_count(); ++k) CHECK(ng.x[k] == doctest::Approx(-1.7).epsilon(1e-12));
}

TEST_CASE("Poisson problem against the direct solve and the series solution") {
    const ProblemSpec pr = build_problem(spec(32, 2.0));
    const Solution sol = solve_double_obstacle(assemble(pr));
    CHECK(sol.converged);
    CHECK(relative_l2(sol.u, poisson_direct(pr.domain, pr.g)) <= 1e-7);
    const Grid& g = pr.domain.grid;
    double err = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) err = std::max(err, std::abs(sol.u[k] - series(g.node(k))));
    // Five-point truncation error: a few times h^2 times the size of u_xxxx.
    CHECK(err < 2e-4);
}

TEST_CASE("solution is feasible and minimizes the energy") {
    InstanceSpec s = spec(24, 3.0);
    s.obstacles = ObstacleModel::active;
    s.F_amplitude = 0.5;
    s.coefficient = CoefficientModel::x2_osc;
    s.g_value = 0.0;
    const DiscreteProblem dp = assemble(build_problem(s));
    const SolverConfig cfg;
    const Solution sol = solve_double_obstacle(dp, cfg);
    REQUIRE(sol.converged);
    CHECK(!sol.active_lower.empty());
    CHECK(!sol.active_upper.empty());
    for (std::size_t k = 0; k < sol.u.size(); ++k) {
        CHECK(sol.u[k] >= dp.spec.psi1[k] - 1e-15);
        CHECK(sol.u[k] <= dp.spec.psi2[k] + 1e-15);
    }
    for (std::size_t i = 1; i < sol.energy_trace.size(); ++i)
        CHECK(sol.energy_trace[i] <= sol.energy_trace[i - 1] + 1e-14 * std::abs(sol.energy_trace[i - 1]));

    // Feasible perturbations cannot lower the energy.
    const double j0 = energy(dp, sol.u, cfg.mu);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        ScalarField v = sol.u;
        for (std::size_t k = 0; k < v.size(); ++k)
            if (dp.spec.domain.is_interior(k))
                v[k] = std::clamp(v[k] + 1e-3 * rng.uniform(-1.0, 1.0), dp.spec.psi1[k], dp.spec.psi2[k]);
        CHECK(energy(dp, v, cfg.mu) >= j0 - 1e-12);
    }
    CHECK(kkt_residual(sol, dp, cfg) <= cfg.tol);
}

TEST_CASE("trivial solver cases") {
    const SolverConfig cfg;
    InstanceSpec z = spec(16, 1.8);
    z.g_value = 0.0;
    const Solution zero = solve_double_obstacle(assemble(build_problem(z)), cfg);
    CHECK(max_abs(zero.u) == 0.0);
    CHECK(zero.iterations == 0);

    InstanceSpec pin = spec(32, 3.0);
    pin.obstacles = ObstacleModel::pinched;
    pin.domain = DomainKind::reifenberg;
    const DiscreteProblem dp = assemble(build_problem(pin));
    const Solution u = solve_double_obstacle(dp, cfg);
    for (std::size_t k = 0; k < u.u.size(); ++k) CHECK(u.u[k] == dp.spec.psi1[k]);
    CHECK(kkt_residual(u.u, dp, cfg) == 0.0);
}

TEST_CASE("assembly validates obstacles and grids") {
    ProblemSpec pr = build_problem(spec(16, 2.0));
    pr.psi1[pr.domain.grid.index(5, 5)] = 20.0;
    CHECK_THROWS_AS(assemble(pr), Error);
    ProblemSpec bad_p = build_problem(spec(16, 2.0));
    bad_p.p = 3.0;
    CHECK_THROWS_AS(assemble(bad_p), Error);
}

TEST_CASE("local problems") {
    InstanceSpec s = spec(32, 2.0);
    s.obstacles = ObstacleModel::active;
    s.F_amplitude = 0.5;
    s.coefficient = CoefficientModel::x1_layers;
    const DiscreteProblem dp = assemble(build_problem(s));
    const Solution u = solve_double_obstacle(dp);
    const CellSet region = cells_in_ball(dp.spec.domain, {{0.5, 0.6}, 0.3}, true);

    const Solution u1 = solve_one_obstacle(dp, region, u.u, dp.spec.psi1);
    for (std::size_t k = 0; k < u1.u.size(); ++k) CHECK(u1.u[k] >= dp.spec.psi1[k] - 1e-15);
    for (std::size_t k = 0; k < u1.u.size(); ++k)
        if (!std::binary_search(region.begin(), region.end(), k)) CHECK(u1.u[k] == u.u[k]);

    const Solution v = solve_dirichlet(dp, region, u.u, DirichletRhs::zero);
    const Solution V = solve_frozen(dp, region, u.u);
    double diff = 0.0;
    for (std::size_t k = 0; k < v.u.size(); ++k) diff = std::max(diff, std::abs(v.u[k] - V.u[k]));
    CHECK(diff <= 1e-12);

    const Solution same = solve_dirichlet(dp, region, dp.spec.psi1, DirichletRhs::div_A_psi1);
    double err = 0.0;
    for (std::size_t k = 0; k < same.u.size(); ++k) err = std::max(err, std::abs(same.u[k] - dp.spec.psi1[k]));
    CHECK(err <= 1e-12);
}

TEST_CASE("frozen coefficient is a column average over the region rows") {
    const Grid g = build_grid(32, 1.0);
    const CoefficientField c =
        make_coefficient(g, 2.0, [](Point x) { return 1.0 + 0.4 * std::sin(7.0 * x.y) * x.x; }, [](Point) { return 1.0; });
    const Domain d = make_domain(g, DomainKind::square, 0.0, 1.0, 0);
    const CellSet region = cells_in_ball(d, {{0.5, 0.5}, 0.2}, true);
    const CoefficientField f = frozen_coefficient(c, region);
    int lo = g.cells(), hi = 0;
    for (std::size_t k : region) {
        lo = std::min(lo, g.row(k));
        hi = std::max(hi, g.row(k));
    }
    for (int i : {3, 16, 29}) {
        double mean = 0.0;
        for (int j = lo; j <= hi; ++j) mean += c.a[g.index(i, j)];
        mean /= hi - lo + 1;
        for (int j = 0; j <= g.cells(); ++j) CHECK(f.a[g.index(i, j)] == doctest::Approx(mean).epsilon(1e-14));
    }
}

TEST_CASE("quadratic energy reproduces the five-point stencil") {
    InstanceSpec s = spec(8, 2.0);
    s.g_value = 0.0;
    s.F_amplitude = 0.0;
    const DiscreteProblem dp = assemble(build_problem(s));
    const Grid& g = dp.spec.domain.grid;
    const ScalarField zero(g);
    CHECK(energy(dp, zero, 0.0) == 0.0);
    // J(u) = u.K u / 2, so K_kl = J(e_k + e_l) - J(e_k) - J(e_l).
    const auto J = [&](std::initializer_list<std::size_t> nodes) {
        ScalarField u(g);
        for (std::size_t k : nodes) u[k] += 1.0;
        return energy(dp, u, 0.0);
    };
    const std::size_t c = g.index(4, 4);
    CHECK(2.0 * J({c}) == doctest::Approx(4.0).epsilon(1e-12));
    for (std::size_t nb : {g.index(5, 4), g.index(3, 4), g.index(4, 5), g.index(4, 3)})
        CHECK(J({c, nb}) - J({c}) - J({nb}) == doctest::Approx(-1.0).epsilon(1e-12));
    for (std::size_t nb : {g.index(5, 5), g.index(3, 3), g.index(5, 3), g.index(3, 5), g.index(6, 4)})
        CHECK(std::abs(J({c, nb}) - J({c}) - J({nb})) <= 1e-12);
}

TEST_CASE("linear terms vanish at zero for any data") {
    InstanceSpec s = spec(16, 3.0);
    s.F_amplitude = 0.7;
    s.g_value = 2.0;
    const DiscreteProblem dp = assemble(build_problem(s));
    CHECK(energy(dp, ScalarField(dp.spec.domain.grid), 1e-8) == 0.0);
}

TEST_CASE("hat function gradients") {
    const Grid g = build_grid(4, 1.0);
    std::vector<double> hat(g.node_count(), 0.0);
    hat[g.index(2, 2)] = 1.0;
    const TriangleGradients tri = triangle_gradients(g, hat);
    const double inv_h = 1.0 / g.spacing();
    int touched = 0;
    for (std::size_t t = 0; t < tri.x.size(); ++t) {
        CHECK((tri.x[t] == 0.0 || std::abs(tri.x[t]) == inv_h));
        CHECK((tri.y[t] == 0.0 || std::abs(tri.y[t]) == inv_h));
        touched += tri.x[t] != 0.0 || tri.y[t] != 0.0;
    }
    // The hat is supported on the six triangles sharing its node.
    CHECK(touched == 6);
}

TEST_CASE("harmonic boundary data is reproduced to second order") {
    for (int n : {16, 32}) {
        InstanceSpec s = spec(n, 2.0);
        s.g_value = 0.0;
        s.F_amplitude = 0.0;
        const DiscreteProblem dp = assemble(build_problem(s));
        const ScalarField exact = sample(dp.spec.domain.grid, [](Point x) { return x.x * x.x - x.y * x.y; });
        const Solution v = solve_dirichlet(dp, interior_cells(dp.spec.domain), exact, DirichletRhs::zero);
        double err = 0.0;
        for (std::size_t k = 0; k < exact.size(); ++k) err = std::max(err, std::abs(v.u[k] - exact[k]));
        const double h = dp.spec.domain.grid.spacing();
        CHECK(err <= h * h);
    }
}

TEST_CASE("residual detects a perturbed solution") {
    InstanceSpec s = spec(16, 2.0);
    const DiscreteProblem dp = assemble(build_problem(s));
    const SolverConfig cfg;
    const Solution sol = solve_double_obstacle(dp, cfg);
    CHECK(kkt_residual(sol, dp, cfg) <= cfg.tol);
    ScalarField bumped = sol.u;
    bumped[dp.spec.domain.grid.index(8, 8)] += dp.spec.domain.grid.spacing();
    CHECK(kkt_residual(bumped, dp, cfg) > cfg.tol);
}
