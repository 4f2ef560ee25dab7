#include "reglab/selftest.hpp"

#include "reglab/common.hpp"
#include "reglab/experiments.hpp"
#include "reglab/field.hpp"
#include "reglab/geometry.hpp"
#include "reglab/instances.hpp"
#include "reglab/norms.hpp"
#include "reglab/operators.hpp"
#include "reglab/solver.hpp"
#include "reglab/weights.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace reglab {

namespace {

class Suite {
public:
    Suite() { result.table = Table({"check", "module", "detail", "verdict"}); }

    void run(const std::string& module, const std::string& name, const std::function<std::string()>& body) {
        std::string detail;
        bool ok = true;
        try {
            detail = body();
            ok = detail.rfind("FAIL", 0) != 0;
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("FAIL exception: ") + e.what();
        }
        result.pass = result.pass && ok;
        result.table.add({name, module, detail, verdict(ok)});
    }

    SelftestResult result;
};

std::string expect(bool ok, const std::string& what) { return (ok ? "" : "FAIL ") + what; }

std::string value(double v) { return "value " + format_real(v); }

template <class Fn>
bool throws(Fn fn) {
    try {
        fn();
    } catch (const Error&) {
        return true;
    }
    return false;
}

// Rotation by 90 degrees about the centre of the extent.
ScalarField rotate(const ScalarField& f) {
    const Grid& g = f.grid;
    const int n = g.cells();
    ScalarField out(g);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) out[g.index(n - j, i)] = f[g.index(i, j)];
    return out;
}

InstanceSpec zero_instance(int grid) {
    InstanceSpec s;
    s.id = "zero";
    s.grid = grid;
    s.F_amplitude = 0.0;
    s.g_value = 0.0;
    return s;
}

void geometry_checks(Suite& t) {
    t.run("geometry", "grid_32", [] {
        const Grid g = build_grid(32, 1.0);
        return expect(g.spacing() == 0.03125 && g.node_count() == 33u * 33u, value(g.spacing()));
    });
    t.run("geometry", "grid_4_extent_2", [] {
        const Grid g = build_grid(4, 2.0);
        return expect(g.spacing() == 0.5, value(g.spacing()));
    });
    t.run("geometry", "grid_3_rejected", [] { return expect(throws([] { build_grid(3, 1.0); }), "rejected"); });
    t.run("geometry", "square_flatness", [] {
        const Grid g = build_grid(32, 1.0);
        const double f = measure_flatness(make_domain(g, DomainKind::square, 0.0, 1.0, 0), 1.0);
        return expect(f <= 2.0 * g.spacing(), value(f));
    });
    t.run("geometry", "half_plane_mask_flatness", [] {
        const Grid g = build_grid(32, 1.0);
        std::vector<std::uint8_t> mask(g.node_count(), 0);
        for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = g.row(k) > 10;
        const double f = measure_flatness(domain_from_mask(g, mask, 0.5), 0.5);
        return expect(f <= 2.0 * g.spacing() / 0.5, value(f));
    });
    t.run("geometry", "reifenberg_delta_rejected", [] {
        return expect(throws([] { make_domain(build_grid(32, 1.0), DomainKind::reifenberg, 0.6, 0.5, 1); }),
                      "rejected");
    });
    t.run("geometry", "ball_outside_extent", [] {
        const Grid g = build_grid(16, 1.0);
        const CellSet s = cells_in_ball(g, {{3.0, 3.0}, g.spacing()});
        return expect(s.empty(), "size " + std::to_string(s.size()));
    });
    t.run("geometry", "ball_covering_extent", [] {
        const Grid g = build_grid(16, 1.0);
        const Domain d = make_domain(g, DomainKind::square, 0.0, 1.0, 0);
        const CellSet s = cells_in_ball(d, {{0.5, 0.5}, 2.0}, false);
        return expect(s.size() == g.node_count(), "size " + std::to_string(s.size()));
    });
}

void weight_checks(Suite& t) {
    const Grid g = build_grid(32, 1.0);
    t.run("weights", "gamma_zero_constant", [&] {
        const Weight w = power_weight(g, {0.5, 0.5}, 0.0);
        double worst = 0.0;
        for (double v : w.values) worst = std::max(worst, std::abs(v - 1.0));
        return expect(worst == 0.0, value(worst));
    });
    t.run("weights", "gamma_one_distance", [&] {
        const Weight w = power_weight(g, {0.5, 0.5}, 1.0);
        const double v = w.values[g.index(24, 16)];
        return expect(std::abs(v - 0.25) < 1e-15, value(v));
    });
    t.run("weights", "gamma_minus_one_singular", [&] {
        const Weight w = power_weight(g, {0.5, 0.5}, -1.0);
        const double v = w.values[g.index(16, 16)];
        return expect(std::abs(v - 2.0 / g.spacing()) < 1e-12, value(v));
    });
    t.run("weights", "unit_measure", [&] {
        const double m = weighted_measure(constant_weight(g), all_cells(g));
        return expect(std::abs(m - 1.0) <= g.spacing(), value(m));
    });
    t.run("weights", "empty_measure", [&] {
        const double m = weighted_measure(constant_weight(g), {});
        return expect(m == 0.0, value(m));
    });
    t.run("weights", "constant_Ap", [&] {
        const Point c[] = {{0.5, 0.5}, {0.3, 0.6}};
        const auto balls = dyadic_ball_family(c, 4.0 * g.spacing(), 0.25);
        const double v = estimate_Ap(constant_weight(g), 2.0, balls);
        return expect(std::abs(v - 1.0) <= 0.01, value(v));
    });
    t.run("weights", "constant_Ainf", [&] {
        Weight w = constant_weight(g);
        const Point c[] = {{0.5, 0.5}};
        const auto balls = dyadic_ball_family(c, 4.0 * g.spacing(), 0.5);
        const AinfPair pr = estimate_Ainf(w, balls, 32, 1);
        return expect(std::abs(pr.nu - 1.0) <= 0.05 && std::abs(pr.c0 - 1.0) <= 0.05,
                      "nu " + format_real(pr.nu) + " c0 " + format_real(pr.c0));
    });
    t.run("weights", "bmo_constant", [&] {
        const auto c = make_coefficient(g, 2.0, [](Point) { return 1.3; }, [](Point) { return 1.0; });
        const double v = partial_bmo_seminorm(c, 0.25, 16);
        return expect(v == 0.0, value(v));
    });
    t.run("weights", "bmo_x1_only", [&] {
        const auto c = make_coefficient(g, 3.0, [](Point x) { return x.x < 0.4 ? 1.0 : (x.x < 0.7 ? 2.5 : 1.7); },
                                        [](Point) { return 1.0; });
        const double v = partial_bmo_seminorm(c, 0.25, 16);
        return expect(v == 0.0, value(v));
    });
}

void operator_checks(Suite& t) {
    const Grid g = build_grid(32, 1.0);
    const RadiusFamily radii = dyadic_radii(g);
    t.run("operators", "maximal_constant", [&] {
        const ScalarField M = frac_maximal(ScalarField(g, 2.5), 0.0, radii);
        const double v = M[g.index(16, 16)];
        return expect(std::abs(v - 2.5) < 1e-12, value(v));
    });
    t.run("operators", "maximal_zero", [&] {
        const double v = max_abs(frac_maximal(ScalarField(g), 0.5, radii));
        return expect(v == 0.0, value(v));
    });
    t.run("operators", "riesz_zero", [&] {
        const double v = max_abs(riesz_potential(ScalarField(g), 1.0));
        return expect(v == 0.0, value(v));
    });
    t.run("operators", "riesz_rotation", [&] {
        const ScalarField f = sample(g, [](Point x) { return std::exp(-8.0 * distance2(x, {0.5, 0.5})); });
        const ScalarField a = rotate(riesz_potential(f, 1.0)), b = riesz_potential(rotate(f), 1.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]) / std::abs(b[k]));
        return expect(worst <= 1e-12, "relative " + format_real(worst));
    });
    t.run("operators", "distribution_half_plane", [&] {
        const Domain d = make_domain(g, DomainKind::square, 0.0, 1.0, 0);
        const double v = distribution(sample(g, [](Point x) { return x.x; }), constant_weight(g), d, std::nullopt, 0.25);
        return expect(std::abs(v - 0.75) <= 2.0 * g.spacing(), value(v));
    });
    t.run("operators", "distribution_above_max", [&] {
        const Domain d = make_domain(g, DomainKind::square, 0.0, 1.0, 0);
        const double v = distribution(sample(g, [](Point x) { return x.x; }), constant_weight(g), d, std::nullopt, 1.0);
        return expect(v == 0.0, value(v));
    });
    t.run("operators", "weak_type_zero", [&] {
        const WeakTypeResult r = weak_type_check(ScalarField(g), 0.5, 1.0, 0.1);
        return expect(r.lhs == 0.0, value(r.lhs));
    });
    t.run("operators", "weak_type_homogeneity", [&] {
        const ScalarField f = sample(g, [](Point x) { return std::sin(3.0 * x.x) * std::cos(2.0 * x.y); });
        ScalarField f2 = f;
        for (double& v : f2.values) v *= 2.0;
        const WeakTypeResult a = weak_type_check(f, 0.0, 1.0, 0.3), b = weak_type_check(f2, 0.0, 1.0, 0.6);
        return expect(a.lhs == b.lhs && std::abs(a.rhs_base - b.rhs_base) <= 1e-12 * a.rhs_base,
                      "lhs " + format_real(a.lhs) + " rhs " + format_real(a.rhs_base));
    });
    t.run("operators", "localization_same_center", [&] {
        const ScalarField f = sample(g, [](Point x) { return x.x * x.y; });
        const LocalizationResult r = localization_check(f, 0.5, {0.5, 0.5}, {0.5, 0.5}, 0.1);
        return expect(r.holds() && r.restricted_sup <= r.bound, value(r.restricted_sup));
    });
    t.run("operators", "localization_zero", [&] {
        const LocalizationResult r = localization_check(ScalarField(g), 0.5, {0.5, 0.5}, {0.55, 0.5}, 0.1);
        return expect(r.restricted_sup == 0.0 && r.bound == 0.0, value(r.bound));
    });
}

void norm_checks(Suite& t) {
    const Grid g = build_grid(32, 1.0);
    const Weight w = constant_weight(g);
    const CellSet cells = all_cells(g);
    const ScalarField f = sample(g, [](Point x) { return 0.3 + std::sin(5.0 * x.x) * x.y; });
    t.run("norms", "lorentz_constant", [&] {
        const double v = lorentz_norm(ScalarField(g, 1.0), w, cells, {2.0, 2.0});
        return expect(std::abs(v - 1.0) <= 1e-6, value(v));
    });
    t.run("norms", "lorentz_homogeneity", [&] {
        ScalarField f2 = f;
        for (double& v : f2.values) v *= 2.0;
        const double a = lorentz_norm(f, w, cells, {3.0, 1.5}), b = lorentz_norm(f2, w, cells, {3.0, 1.5});
        return expect(std::abs(b - 2.0 * a) <= 1e-10 * a, value(b / a));
    });
    t.run("norms", "luxemburg_zero", [&] {
        const double v = luxemburg_norm(ScalarField(g), w, cells, YoungFunction::power(2.0), {2.0, 2.0});
        return expect(v == 0.0, value(v));
    });
    t.run("norms", "luxemburg_homogeneity", [&] {
        ScalarField f3 = f;
        for (double& v : f3.values) v *= 3.0;
        const YoungFunction phi = YoungFunction::power_log(2.5);
        const double a = luxemburg_norm(f, w, cells, phi, {2.0, 2.0}), b = luxemburg_norm(f3, w, cells, phi, {2.0, 2.0});
        return expect(std::abs(b - 3.0 * a) <= 1e-8 * a, value(b / a));
    });
    t.run("norms", "fund_constant_p2", [] {
        const double c = estimate_fund_constant(2.0, 0.1, 10000, 1);
        return expect(c <= 1.0, value(c));
    });
}

void solver_checks(Suite& t) {
    const SolverConfig cfg;
    t.run("solver", "energy_at_zero", [&] {
        InstanceSpec s = zero_instance(16);
        s.F_amplitude = 0.7;
        s.g_value = 1.3;
        s.p = 3.0;
        const DiscreteProblem dp = assemble(build_problem(s));
        const double j = energy(dp, ScalarField(dp.spec.domain.grid), cfg.mu);
        return expect(j == 0.0, value(j));
    });
    t.run("solver", "hat_gradient", [] {
        const Grid g = build_grid(4, 1.0);
        std::vector<double> u(g.node_count(), 0.0);
        u[g.index(2, 2)] = 1.0;
        const TriangleGradients tg = triangle_gradients(g, u);
        double worst = 0.0;
        for (std::size_t k = 0; k < tg.x.size(); ++k)
            for (double v : {tg.x[k], tg.y[k]})
                worst = std::max(worst, std::min({std::abs(v), std::abs(std::abs(v) - 4.0)}));
        return expect(worst == 0.0, "entries in {0, +-1/h}");
    });
    t.run("solver", "zero_data", [&] {
        const Solution sol = solve_double_obstacle(assemble(build_problem(zero_instance(16))), cfg);
        return expect(max_abs(sol.u) == 0.0 && sol.iterations == 0, "iterations " + std::to_string(sol.iterations));
    });
    t.run("solver", "pinched", [&] {
        InstanceSpec s = zero_instance(16);
        s.obstacles = ObstacleModel::pinched;
        s.F_amplitude = 0.4;
        s.p = 3.0;
        const DiscreteProblem dp = assemble(build_problem(s));
        const Solution sol = solve_double_obstacle(dp, cfg);
        double worst = 0.0;
        for (std::size_t k = 0; k < sol.u.size(); ++k) worst = std::max(worst, std::abs(sol.u[k] - dp.spec.psi1[k]));
        return expect(worst == 0.0 && kkt_residual(sol.u, dp, cfg) == 0.0, value(worst));
    });
    t.run("solver", "perturbed_residual", [&] {
        InstanceSpec s = zero_instance(16);
        s.g_value = 1.0;
        const DiscreteProblem dp = assemble(build_problem(s));
        ScalarField u = solve_double_obstacle(dp, cfg).u;
        const double before = kkt_residual(u, dp, cfg);
        u[dp.spec.domain.grid.index(8, 8)] += dp.spec.domain.grid.spacing();
        const double after = kkt_residual(u, dp, cfg);
        return expect(after > 0.0 && after > before, value(after));
    });
    t.run("solver", "dirichlet_zero", [&] {
        InstanceSpec s = zero_instance(16);
        s.F_amplitude = 0.5;
        s.p = 3.0;
        const DiscreteProblem dp = assemble(build_problem(s));
        const Grid& g = dp.spec.domain.grid;
        const CellSet region = cells_in_ball(dp.spec.domain, {{0.5, 0.5}, 0.3}, true);
        const Solution v = solve_dirichlet(dp, region, ScalarField(g), DirichletRhs::zero, cfg);
        return expect(max_abs(v.u) == 0.0, value(max_abs(v.u)));
    });
    t.run("solver", "dirichlet_psi1_exact", [&] {
        InstanceSpec s = zero_instance(16);
        s.obstacles = ObstacleModel::active;
        const DiscreteProblem dp = assemble(build_problem(s));
        const CellSet region = cells_in_ball(dp.spec.domain, {{0.5, 0.5}, 0.3}, true);
        const Solution v = solve_dirichlet(dp, region, dp.spec.psi1, DirichletRhs::div_A_psi1, cfg);
        double worst = 0.0;
        for (std::size_t k = 0; k < v.u.size(); ++k) worst = std::max(worst, std::abs(v.u[k] - dp.spec.psi1[k]));
        return expect(worst <= 1e-12, value(worst));
    });
    t.run("solver", "frozen_x1_identity", [&] {
        InstanceSpec s = zero_instance(16);
        s.coefficient = CoefficientModel::x1_layers;
        s.F_amplitude = 0.5;
        s.g_value = 1.0;
        const DiscreteProblem dp = assemble(build_problem(s));
        const Solution u = solve_double_obstacle(dp, cfg);
        const CellSet region = cells_in_ball(dp.spec.domain, {{0.5, 0.5}, 0.3}, true);
        const Solution v = solve_dirichlet(dp, region, u.u, DirichletRhs::zero, cfg);
        const Solution V = solve_frozen(dp, region, u.u, cfg);
        double worst = 0.0;
        for (std::size_t k = 0; k < v.u.size(); ++k) worst = std::max(worst, std::abs(v.u[k] - V.u[k]));
        return expect(worst <= 1e-12, value(worst));
    });
}

void experiment_checks(Suite& t) {
    t.run("experiments", "goodlambda_zero_instance", [] {
        GoodLambdaConfig cfg;
        cfg.grids = {8, 16};
        cfg.lambda_knots = 8;
        const ExperimentReport r = run_good_lambda({zero_instance(8)}, cfg);
        const std::size_t col = r.summary.column("C_fine");
        bool zero = true;
        for (const auto& row : r.summary.rows()) zero = zero && row[col] == "0";
        return expect(r.pass && zero, "vacuous");
    });
    t.run("experiments", "chain_zero_instance", [] {
        ChainConfig cfg;
        cfg.grids = {32};
        const ExperimentReport r = run_comparison_chain({zero_instance(32)}, cfg);
        return expect(r.pass, "collapsed chain");
    });
}

} // namespace

SelftestResult run_selftest() {
    Suite t;
    geometry_checks(t);
    weight_checks(t);
    operator_checks(t);
    norm_checks(t);
    solver_checks(t);
    experiment_checks(t);
    return t.result;
}

} // namespace reglab
