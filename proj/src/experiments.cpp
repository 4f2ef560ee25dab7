#include "reglab/experiments.hpp"

#include "reglab/common.hpp"
#include "reglab/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <thread>

namespace reglab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results are written by
// index, so the merge order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
    std::vector<std::exception_ptr> errors(n);
    const auto body = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n)); ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

InstanceSpec at_grid(InstanceSpec spec, int grid) {
    spec.grid = grid;
    return spec;
}

std::vector<double> log_knots(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[i] = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return out;
}

double max_over(const ScalarField& f, const Domain& d) {
    double m = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (d.is_interior(k)) m = std::max(m, std::abs(f[k]));
    return m;
}

double min_positive_over(const ScalarField& f, const Domain& d) {
    double m = kInf;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (d.is_interior(k) && f[k] > 0.0) m = std::min(m, f[k]);
    return m;
}

// Mean of |v|^e over the listed nodes.
double mean_pow(const std::vector<double>& v, const CellSet& nodes, double e) {
    if (nodes.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t k : nodes) s += std::pow(std::abs(v[k]), e);
    return s / static_cast<double>(nodes.size());
}

std::vector<double> magnitude(const VectorField& g) {
    std::vector<double> out(g.x.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::hypot(g.x[k], g.y[k]);
    return out;
}

std::vector<double> difference_magnitude(const VectorField& a, const VectorField& b) {
    std::vector<double> out(a.x.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::hypot(a.x[k] - b.x[k], a.y[k] - b.y[k]);
    return out;
}

bool within(double change, double band) { return std::isfinite(change) && std::abs(change - 1.0) <= band; }

} // namespace

double growth(double a, double b) {
    if (a == 0.0) return b == 0.0 ? 1.0 : kInf;
    return b / a;
}

std::string write_report(const ExperimentReport& report, const std::string& directory) {
    std::filesystem::create_directories(directory);
    const std::string main = (std::filesystem::path(directory) / (report.name + ".csv")).string();
    report.rows.save(main);
    report.summary.save((std::filesystem::path(directory) / (report.name + "_summary.csv")).string());
    for (const auto& [file, text] : report.attachments) write_text((std::filesystem::path(directory) / file).string(), text);
    return main;
}

SolvedInstance solve_instance(const InstanceSpec& spec, const SolverConfig& config) {
    ProblemSpec problem = build_problem(spec);
    const DiscreteProblem dp = assemble(problem);
    Solution sol = solve_double_obstacle(dp, config);
    const Domain& dom = problem.domain;
    const Grid& g = dom.grid;
    const ScalarField F = composite_datum(problem);
    SolvedInstance out{spec, problem, std::move(sol), ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!dom.is_interior(k)) continue;
        out.grad_abs[k] = std::hypot(out.solution.grad_u.x[k], out.solution.grad_u.y[k]);
        out.datum[k] = F[k];
        out.grad_p[k] = std::pow(out.grad_abs[k], spec.p);
        out.datum_p[k] = std::pow(F[k], spec.p);
    }
    return out;
}

// ---------------------------------------------------------------- good lambda

namespace {

struct GoodLambdaRun {
    Table rows;
    bool converged = true;
    double c0 = 1.0, nu = 1.0;
    // best[alpha][eps] = minimal C over sigma candidates
    std::vector<std::vector<double>> best;
    std::vector<std::vector<double>> best_sigma;
    int monotone_failures = 0;
    bool vacuous = false;
    std::string svg;
};

GoodLambdaRun good_lambda_at(const InstanceSpec& spec, const GoodLambdaConfig& cfg, const Table& schema) {
    GoodLambdaRun run;
    run.rows = Table(schema.header());
    const SolvedInstance si = solve_instance(spec, cfg.solver);
    run.converged = si.solution.converged;
    const Domain& dom = si.problem.domain;
    const Grid& g = dom.grid;
    const Weight w = build_weight(g, spec.gamma, spec.seed);
    run.c0 = w.a_inf->c0;
    run.nu = w.a_inf->nu;
    const RadiusFamily radii = dyadic_radii(g);

    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
        const double alpha = cfg.alphas[ai];
        const ScalarField Mu = frac_maximal(si.grad_p, alpha, radii);
        const ScalarField MF = frac_maximal(si.datum_p, alpha, radii);
        const double hi = max_over(Mu, dom);
        run.best.emplace_back(cfg.epsilons.size(), 0.0);
        run.best_sigma.emplace_back(cfg.epsilons.size(), 0.0);
        if (hi == 0.0) {
            run.vacuous = true;
            continue;
        }
        const double lo = min_positive_over(Mu, dom);
        const double a = cfg.margin * (2.0 / run.nu) * (1.0 - alpha / 2.0);
        const double kappa = max_over(MF, dom) / hi;
        const std::vector<double> knots = log_knots(lo, hi, cfg.lambda_knots);
        std::vector<double> rhs1(knots.size());
        for (std::size_t i = 0; i < knots.size(); ++i) rhs1[i] = distribution(Mu, w, dom, std::nullopt, knots[i]);

        for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei) {
            const double eps = cfg.epsilons[ei];
            std::vector<double> lhs(knots.size());
            for (std::size_t i = 0; i < knots.size(); ++i)
                lhs[i] = distribution(Mu, w, dom, std::nullopt, std::pow(eps, -a) * knots[i]);
            for (std::size_t i = 0; i < knots.size(); ++i) {
                if (i > 0 && lhs[i] > lhs[i - 1]) ++run.monotone_failures;
                if (lhs[i] > rhs1[i]) ++run.monotone_failures;
            }
            double best = kInf, best_sigma = 0.0;
            std::vector<double> best_rhs2;
            for (int power : cfg.sigma_powers) {
                const double sigma = std::pow(eps, power) * kappa;
                std::vector<double> rhs2(knots.size());
                double C = 0.0;
                std::vector<double> per(knots.size(), 0.0);
                for (std::size_t i = 0; i < knots.size(); ++i) {
                    rhs2[i] = distribution(MF, w, dom, std::nullopt, sigma * knots[i]);
                    if (rhs1[i] > 0.0) per[i] = std::max(0.0, (lhs[i] - rhs2[i]) / (eps * rhs1[i]));
                    C = std::max(C, per[i]);
                }
                for (std::size_t i = 0; i < knots.size(); ++i)
                    run.rows.add({spec.id, cell(spec.grid), cell(spec.p), cell(alpha), cell(spec.gamma), cell(eps),
                                  cell(sigma), cell(knots[i]), cell(lhs[i]), cell(rhs1[i]), cell(rhs2[i]), cell(per[i]),
                                  verdict(std::isfinite(per[i])), cell(run.c0), cell(run.nu)});
                if (C < best) {
                    best = C;
                    best_sigma = sigma;
                    best_rhs2 = rhs2;
                }
            }
            run.best[ai][ei] = best;
            run.best_sigma[ai][ei] = best_sigma;
            if (ai == 0 && ei == 0)
                run.svg = svg_loglog("good-lambda " + spec.id + " grid " + std::to_string(spec.grid) + " eps " +
                                         format_real(eps),
                                     "lambda",
                                     {{"lhs D(eps^-a l)", knots, lhs}, {"D(l)", knots, rhs1}, {"D_F(sigma l)", knots, best_rhs2}});
        }
    }
    return run;
}

} // namespace

ExperimentReport run_good_lambda(const std::vector<InstanceSpec>& instances, const GoodLambdaConfig& cfg) {
    require(!instances.empty(), "good-lambda: empty instance list");
    require(!cfg.grids.empty() && cfg.lambda_knots >= 2, "good-lambda: need grids and at least 2 knots");
    for (double alpha : cfg.alphas) require(alpha >= 0.0 && alpha < 2.0, "good-lambda: alpha must lie in [0, 2)");
    for (double eps : cfg.epsilons) require(eps > 0.0 && eps < 1.0, "good-lambda: epsilon must lie in (0, 1)");

    ExperimentReport rep;
    rep.name = "goodlambda";
    const Table schema({"instance_id", "grid", "p", "alpha", "gamma", "epsilon", "sigma", "lambda", "lhs", "rhs1", "rhs2",
                        "C_emp", "verdict", "c0", "nu"});
    rep.rows = schema;
    rep.summary = Table({"instance_id", "p", "alpha", "gamma", "epsilon", "grid_coarse", "grid_fine", "C_coarse",
                         "C_fine", "sigma_coarse", "sigma_fine", "growth", "monotone_failures", "converged", "verdict"});

    const std::size_t G = cfg.grids.size();
    std::vector<GoodLambdaRun> runs(instances.size() * G);
    parallel_for(runs.size(), cfg.jobs, [&](std::size_t k) {
        runs[k] = good_lambda_at(at_grid(instances[k / G], cfg.grids[k % G]), cfg, schema);
    });

    for (std::size_t n = 0; n < instances.size(); ++n) {
        const InstanceSpec& spec = instances[n];
        int failures = 0;
        bool converged = true;
        for (std::size_t gi = 0; gi < G; ++gi) {
            const GoodLambdaRun& r = runs[n * G + gi];
            for (const auto& row : r.rows.rows()) rep.rows.add(row);
            failures += r.monotone_failures;
            converged = converged && r.converged;
            if (r.vacuous) rep.notes.push_back(spec.id + ": all-zero gradient at grid " + std::to_string(cfg.grids[gi]) +
                                               " (inequality vacuous)");
        }
        if (!runs[n * G + G - 1].svg.empty())
            rep.attachments.emplace_back("goodlambda_" + spec.id + ".svg", runs[n * G + G - 1].svg);
        if (!converged) rep.solver_failure = true;
        const GoodLambdaRun& coarse = runs[n * G];
        const GoodLambdaRun& fine = runs[n * G + G - 1];
        for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
            for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei) {
                const double c1 = coarse.best[ai][ei], c2 = fine.best[ai][ei];
                const double gr = growth(c1, c2);
                const bool ok = std::isfinite(c1) && std::isfinite(c2) && gr <= 2.0 && failures == 0 && converged;
                rep.pass = rep.pass && ok;
                rep.summary.add({spec.id, cell(spec.p), cell(cfg.alphas[ai]), cell(spec.gamma), cell(cfg.epsilons[ei]),
                                 cell(cfg.grids.front()), cell(cfg.grids.back()), cell(c1), cell(c2),
                                 cell(coarse.best_sigma[ai][ei]), cell(fine.best_sigma[ai][ei]), cell(gr),
                                 cell(failures), cell(converged ? 1 : 0), verdict(ok)});
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------- norm ratio

namespace {

struct NormRow {
    double lorentz = 0.0, gradient = 0.0, luxemburg = 0.0;
    bool excluded = false;
    bool converged = true;
    double c0 = 1.0, nu = 1.0;
};

double ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
    return num / den;
}

} // namespace

ExperimentReport run_norm_ratio(const std::vector<ExperimentCase>& suite, const NormRatioConfig& cfg) {
    require(!suite.empty(), "norm-ratio: empty suite");
    ExperimentReport rep;
    rep.name = "normratio";
    rep.rows = Table({"instance_id", "grid", "p", "alpha", "gamma", "q", "s", "phi", "lorentz_ratio", "gradient_ratio",
                      "luxemburg_ratio", "obstacles", "c0", "nu", "converged"});
    rep.summary = Table({"path", "grid_coarse", "grid_fine", "max_coarse", "max_fine", "change", "pinched_max", "verdict"});

    const std::size_t G = cfg.grids.size();
    std::vector<NormRow> res(suite.size() * G);
    parallel_for(res.size(), cfg.jobs, [&](std::size_t k) {
        const ExperimentCase& c = suite[k / G];
        const SolvedInstance si = solve_instance(at_grid(c.instance, cfg.grids[k % G]), cfg.solver);
        const Domain& dom = si.problem.domain;
        const Weight w = build_weight(dom.grid, c.instance.gamma, c.instance.seed);
        const CellSet region = interior_cells(dom);
        NormRow& r = res[k];
        r.converged = si.solution.converged;
        r.c0 = w.a_inf->c0;
        r.nu = w.a_inf->nu;
        if (max_abs(si.datum) == 0.0) {
            r.excluded = true;
            return;
        }
        const RadiusFamily radii = dyadic_radii(dom.grid);
        const ScalarField Mu = frac_maximal(si.grad_p, c.alpha, radii);
        const ScalarField MF = frac_maximal(si.datum_p, c.alpha, radii);
        r.lorentz = ratio(lorentz_norm(Mu, w, region, cfg.params), lorentz_norm(MF, w, region, cfg.params));
        r.gradient = ratio(lorentz_norm(si.grad_abs, w, region, cfg.params), lorentz_norm(si.datum, w, region, cfg.params));
        if (cfg.phi)
            r.luxemburg = ratio(luxemburg_norm(Mu, w, region, *cfg.phi, cfg.params),
                                luxemburg_norm(MF, w, region, *cfg.phi, cfg.params));
    });

    const std::string phi_name =
        cfg.phi ? (cfg.phi->kind() == YoungKind::power ? "power(" : "power_log(") + format_real(cfg.phi->p()) + ")"
                : "none";
    // [path][grid] suite maxima, plus pinched maxima per path.
    double maxima[3][2] = {{0, 0}, {0, 0}, {0, 0}};
    double pinched[3] = {0, 0, 0};
    for (std::size_t n = 0; n < suite.size(); ++n) {
        const ExperimentCase& c = suite[n];
        for (std::size_t gi = 0; gi < G; ++gi) {
            const NormRow& r = res[n * G + gi];
            if (!r.converged) rep.solver_failure = true;
            if (r.excluded) {
                rep.notes.push_back(c.instance.id + ": zero composite datum at grid " + std::to_string(cfg.grids[gi]) +
                                    ", excluded");
                continue;
            }
            rep.rows.add({c.instance.id, cell(cfg.grids[gi]), cell(c.instance.p), cell(c.alpha), cell(c.instance.gamma),
                          cell(cfg.params.q), cell(cfg.params.s), phi_name, cell(r.lorentz), cell(r.gradient),
                          cell(r.luxemburg), to_string(c.instance.obstacles), cell(r.c0), cell(r.nu),
                          cell(r.converged ? 1 : 0)});
            const double vals[3] = {r.lorentz, r.gradient, r.luxemburg};
            const std::size_t slot = gi == 0 ? 0 : (gi == G - 1 ? 1 : 2);
            for (int p = 0; p < 3; ++p) {
                if (slot < 2) maxima[p][slot] = std::max(maxima[p][slot], vals[p]);
                if (c.instance.obstacles == ObstacleModel::pinched) pinched[p] = std::max(pinched[p], vals[p]);
            }
        }
    }
    const char* names[3] = {"lorentz", "gradient", "luxemburg"};
    for (int p = 0; p < 3; ++p) {
        if (p == 2 && !cfg.phi) continue;
        const double change = growth(maxima[p][0], maxima[p][1]);
        const bool ok = std::isfinite(maxima[p][0]) && std::isfinite(maxima[p][1]) && within(change, 0.5) &&
                        pinched[p] <= 1.02;
        rep.pass = rep.pass && ok;
        rep.summary.add({names[p], cell(cfg.grids.front()), cell(cfg.grids.back()), cell(maxima[p][0]),
                         cell(maxima[p][1]), cell(change), cell(pinched[p]), verdict(ok)});
    }
    if (rep.solver_failure) rep.pass = false;
    return rep;
}

// ---------------------------------------------------------------- pointwise Riesz

ExperimentReport run_pointwise_riesz(const std::vector<ExperimentCase>& suite, const PointwiseConfig& cfg) {
    require(!suite.empty(), "pointwise: empty suite");
    require(cfg.beta > 0.0 && cfg.beta < 2.0, "pointwise: beta must lie in (0, 2)");
    require(cfg.t > 0.0, "pointwise: t must be positive");
    require(cfg.sample_points > 0, "pointwise: need sample points");
    ExperimentReport rep;
    rep.name = "pointwise";
    rep.rows = Table({"instance_id", "grid", "p", "alpha", "gamma", "beta", "t", "x1", "x2", "inside", "lhs", "rhs",
                      "ratio"});
    rep.summary = Table({"instance_id", "obstacles", "grid_coarse", "grid_fine", "max_coarse", "max_fine", "change",
                         "zero_rhs_points", "verdict"});

    std::vector<Point> pts;
    Rng rng(cfg.seed);
    for (int i = 0; i < cfg.sample_points; ++i) {
        const double x = rng.uniform(), y = rng.uniform();
        pts.push_back({x, y});
    }

    struct Res {
        Table rows;
        double max_ratio = 0.0;
        int zero_rhs = 0;
        bool converged = true;
    };
    const std::size_t G = cfg.grids.size();
    std::vector<Res> res(suite.size() * G);
    parallel_for(res.size(), cfg.jobs, [&](std::size_t k) {
        const ExperimentCase& c = suite[k / G];
        const SolvedInstance si = solve_instance(at_grid(c.instance, cfg.grids[k % G]), cfg.solver);
        const Domain& dom = si.problem.domain;
        const Grid& g = dom.grid;
        const RadiusFamily radii = dyadic_radii(g);
        ScalarField fu = frac_maximal(si.grad_p, c.alpha, radii);
        ScalarField fF = frac_maximal(si.datum_p, c.alpha, radii);
        for (std::size_t q = 0; q < fu.size(); ++q) {
            fu[q] = dom.is_interior(q) ? std::pow(fu[q], cfg.t) : 0.0;
            fF[q] = dom.is_interior(q) ? std::pow(fF[q], cfg.t) : 0.0;
        }
        Res& r = res[k];
        r.rows = Table(rep.rows.header());
        r.converged = si.solution.converged;
        for (const Point& x : pts) {
            const std::size_t node = g.nearest_node(x);
            const Point at = g.node(node);
            const double lhs = riesz_at(fu, cfg.beta, at), rhs = riesz_at(fF, cfg.beta, at);
            if (rhs == 0.0) ++r.zero_rhs;
            const double rt = ratio(lhs, rhs);
            r.max_ratio = std::max(r.max_ratio, rt);
            r.rows.add({c.instance.id, cell(g.cells()), cell(c.instance.p), cell(c.alpha), cell(c.instance.gamma),
                        cell(cfg.beta), cell(cfg.t), cell(at.x), cell(at.y), cell(dom.is_interior(node) ? 1 : 0),
                        cell(lhs), cell(rhs), cell(rt)});
        }
    });

    for (std::size_t n = 0; n < suite.size(); ++n) {
        const ExperimentCase& c = suite[n];
        int zero = 0;
        bool converged = true;
        for (std::size_t gi = 0; gi < G; ++gi) {
            for (const auto& row : res[n * G + gi].rows.rows()) rep.rows.add(row);
            zero += res[n * G + gi].zero_rhs;
            converged = converged && res[n * G + gi].converged;
        }
        if (zero) rep.notes.push_back(c.instance.id + ": identically zero right side at " + std::to_string(zero) + " points");
        const double m1 = res[n * G].max_ratio, m2 = res[n * G + G - 1].max_ratio;
        const double change = growth(m1, m2);
        bool ok = std::isfinite(m1) && std::isfinite(m2) && within(change, 0.5) && converged;
        if (c.instance.obstacles == ObstacleModel::pinched) ok = ok && m1 <= 1.02 && m2 <= 1.02;
        if (!converged) rep.solver_failure = true;
        rep.pass = rep.pass && ok;
        rep.summary.add({c.instance.id, to_string(c.instance.obstacles), cell(cfg.grids.front()), cell(cfg.grids.back()),
                         cell(m1), cell(m2), cell(change), cell(zero), verdict(ok)});
    }
    return rep;
}

// ---------------------------------------------------------------- comparison chain

namespace {

struct ChainRow {
    std::vector<std::string> cells;
    std::vector<double> rh; ///< per gamma
    bool facts_ok = true;
    bool x1_ok = true;
    bool converged = true;
    std::string failure;
};

ChainRow chain_at(const InstanceSpec& spec, const ChainConfig& cfg, bool boundary_ball) {
    ChainRow out;
    const SolvedInstance si = solve_instance(spec, cfg.solver);
    const ProblemSpec& pr = si.problem;
    const Domain& dom = pr.domain;
    const Grid& g = dom.grid;
    const DiscreteProblem dp = assemble(pr);
    const double p = spec.p;
    const double eps_h = 10.0 * std::pow(cfg.solver.tol, 1.0 / p);

    Point c{0.5, 0.62};
    if (boundary_ball) c = {0.5, boundary_height(spec, 0.5)};
    const double R = cfg.ball_radius, rho = R / 3.0;
    const CellSet omega_B = cells_in_ball(dom, {c, R}, true);
    const CellSet omega_2rho = cells_in_ball(dom, {c, 2.0 * rho}, true);
    const CellSet omega_rho = cells_in_ball(dom, {c, rho}, true);

    std::string stage = "u1";
    double max_u1 = -kInf, min_u2 = kInf, delta_emp = 0.0, vw = 0.0, dvV = 0.0;
    std::vector<double> C(cfg.epsilons.size(), 0.0);
    out.rh.assign(cfg.rh_gammas.size(), 0.0);
    int iterations = si.solution.iterations;
    try {
        out.converged = si.solution.converged;
        const Solution u1 = solve_one_obstacle(dp, omega_B, si.solution.u, pr.psi1, OneObstacleRhs::div_A_psi2,
                                               cfg.solver);
        stage = "u2";
        const Solution u2 = solve_dirichlet(dp, omega_B, u1.u, DirichletRhs::div_A_psi1, cfg.solver);
        stage = "v";
        const Solution v = solve_dirichlet(dp, omega_B, u2.u, DirichletRhs::zero, cfg.solver);
        stage = "V";
        const Solution V = solve_frozen(dp, omega_2rho, v.u, cfg.solver);
        out.converged = out.converged && u1.converged && u2.converged && v.converged && V.converged;
        iterations += u1.iterations + u2.iterations + v.iterations + V.iterations;

        for (std::size_t k : omega_B) {
            max_u1 = std::max(max_u1, u1.u[k] - pr.psi2[k]);
            min_u2 = std::min(min_u2, u2.u[k] - pr.psi1[k]);
        }
        const std::vector<double> du = magnitude(si.solution.grad_u);
        const std::vector<double> duv = difference_magnitude(si.solution.grad_u, v.grad_u);
        const double mean_Fp = mean_pow(si.datum.values, omega_B, p);
        const double mean_dup = mean_pow(du, omega_B, p), mean_duvp = mean_pow(duv, omega_B, p);
        for (std::size_t e = 0; e < cfg.epsilons.size(); ++e)
            C[e] = ratio(std::max(0.0, mean_duvp - cfg.epsilons[e] * mean_dup), mean_Fp);

        const std::vector<double> dV = magnitude(V.grad_u);
        const double base = mean_pow(dV, omega_2rho, p);
        for (std::size_t q = 0; q < cfg.rh_gammas.size(); ++q) {
            const double gam = cfg.rh_gammas[q];
            out.rh[q] = ratio(std::pow(mean_pow(dV, omega_rho, gam * p), 1.0 / gam), base);
        }
        delta_emp = partial_bmo_seminorm(pr.coeff, 2.0 * rho, 16);
        const std::vector<double> dvV_field = difference_magnitude(v.grad_u, V.grad_u);
        for (std::size_t k : omega_2rho) dvV = std::max(dvV, dvV_field[k]);
        vw = ratio(mean_pow(dvV_field, omega_rho, p), delta_emp * mean_pow(magnitude(v.grad_u), omega_2rho, p));
    } catch (const Error& e) {
        out.failure = stage + ": " + e.what();
        out.facts_ok = false;
    }
    out.facts_ok = out.facts_ok && max_u1 <= eps_h && min_u2 >= -eps_h;
    if (spec.coefficient == CoefficientModel::x1_layers) out.x1_ok = delta_emp == 0.0 && dvV <= 1e-10;

    out.cells = {spec.id, cell(g.cells()), cell(p), to_string(spec.coefficient), to_string(spec.domain),
                 boundary_ball ? "boundary" : "interior", cell(c.x), cell(c.y), cell(R), cell(rho), cell(max_u1),
                 cell(min_u2), cell(eps_h)};
    for (double v : C) out.cells.push_back(cell(v));
    for (double v : out.rh) out.cells.push_back(cell(v));
    out.cells.insert(out.cells.end(), {cell(delta_emp), cell(vw), cell(dvV), cell(iterations),
                                       cell(out.converged ? 1 : 0), out.failure.empty() ? "ok" : out.failure});
    return out;
}

} // namespace

ExperimentReport run_comparison_chain(const std::vector<InstanceSpec>& suite, const ChainConfig& cfg) {
    require(!suite.empty(), "chain: empty suite");
    ExperimentReport rep;
    rep.name = "chain";
    std::vector<std::string> header{"instance_id", "grid", "p", "coefficient", "domain", "ball", "center_x", "center_y",
                                    "radius", "rho", "max_u1_minus_psi2", "min_u2_minus_psi1", "eps_h"};
    for (double e : cfg.epsilons) header.push_back("C_eps_" + format_real(e));
    for (double gm : cfg.rh_gammas) header.push_back("RH_gamma_" + format_real(gm));
    for (const char* h : {"delta_emp", "vw_ratio", "max_grad_v_minus_V", "iterations", "converged", "status"})
        header.push_back(h);
    rep.rows = Table(header);
    std::vector<std::string> sh{"instance_id", "ball", "grid_coarse", "grid_fine"};
    for (double gm : cfg.rh_gammas) {
        sh.push_back("RH_gamma_" + format_real(gm) + "_coarse");
        sh.push_back("RH_gamma_" + format_real(gm) + "_fine");
        sh.push_back("RH_gamma_" + format_real(gm) + "_growth");
    }
    for (const char* h : {"facts", "x1_check", "verdict"}) sh.push_back(h);
    rep.summary = Table(sh);

    const std::size_t G = cfg.grids.size();
    std::vector<ChainRow> res(suite.size() * G * 2);
    parallel_for(res.size(), cfg.jobs, [&](std::size_t k) {
        const std::size_t n = k / (2 * G), gi = (k / 2) % G;
        res[k] = chain_at(at_grid(suite[n], cfg.grids[gi]), cfg, k % 2 == 1);
    });

    for (std::size_t n = 0; n < suite.size(); ++n) {
        for (int b = 0; b < 2; ++b) {
            bool facts = true, x1 = true, converged = true;
            for (std::size_t gi = 0; gi < G; ++gi) {
                const ChainRow& r = res[(n * G + gi) * 2 + b];
                rep.rows.add(r.cells);
                facts = facts && r.facts_ok;
                x1 = x1 && r.x1_ok;
                converged = converged && r.converged;
                if (!r.failure.empty()) rep.notes.push_back(suite[n].id + ": " + r.failure);
            }
            const ChainRow& lo = res[(n * G) * 2 + b];
            const ChainRow& hi = res[(n * G + G - 1) * 2 + b];
            std::vector<std::string> row{suite[n].id, b ? "boundary" : "interior", cell(cfg.grids.front()),
                                         cell(cfg.grids.back())};
            bool rh_ok = true;
            for (std::size_t q = 0; q < cfg.rh_gammas.size(); ++q) {
                const double gr = growth(lo.rh[q], hi.rh[q]);
                rh_ok = rh_ok && std::isfinite(lo.rh[q]) && std::isfinite(hi.rh[q]) && gr <= 2.0;
                row.insert(row.end(), {cell(lo.rh[q]), cell(hi.rh[q]), cell(gr)});
            }
            const bool ok = facts && x1 && rh_ok && converged;
            if (!converged) rep.solver_failure = true;
            rep.pass = rep.pass && ok;
            row.insert(row.end(), {verdict(facts), verdict(x1), verdict(ok)});
            rep.summary.add(row);
        }
    }
    return rep;
}

// ---------------------------------------------------------------- weak type

ExperimentReport run_weak_type(const WeakTypeConfig& cfg) {
    require(cfg.fields > 0 && cfg.lambdas >= 2, "weak type: need fields and lambdas");
    ExperimentReport rep;
    rep.name = "weaktype";
    rep.rows = Table({"field", "grid", "alpha", "s", "lambda", "lhs", "rhs_base", "ratio"});
    rep.summary = Table({"field", "alpha", "s", "grid_coarse", "grid_fine", "sup_coarse", "sup_fine", "growth", "verdict"});

    // Resolution-independent random fields: Gaussian bumps plus one disk indicator.
    struct Bump {
        Point c;
        double w, amp;
    };
    std::vector<std::vector<Bump>> bumps(static_cast<std::size_t>(cfg.fields));
    std::vector<Ball> disks;
    Rng rng(cfg.seed);
    for (auto& b : bumps) {
        for (int q = 0; q < 4; ++q) b.push_back({{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)}, rng.uniform(0.03, 0.15),
                                                 rng.uniform(0.5, 2.0)});
        disks.push_back({{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)}, rng.uniform(0.05, 0.2)});
    }

    for (std::size_t f = 0; f < bumps.size(); ++f) {
        for (const auto& [alpha, s] : cfg.alpha_s) {
            std::vector<double> sup(cfg.grids.size(), 0.0);
            for (std::size_t gi = 0; gi < cfg.grids.size(); ++gi) {
                const Grid g = build_grid(cfg.grids[gi], 1.0);
                const ScalarField field = sample(g, [&](Point x) {
                    double v = distance2(x, disks[f].center) < disks[f].radius * disks[f].radius ? 1.0 : 0.0;
                    for (const Bump& b : bumps[f]) v += b.amp * std::exp(-distance2(x, b.c) / (2.0 * b.w * b.w));
                    return v;
                });
                const double top = max_abs(frac_maximal(field, alpha, dyadic_radii(g)));
                const std::vector<double> lambdas = log_knots(1e-2 * top, top, cfg.lambdas);
                const auto results = weak_type_sweep(field, alpha, s, lambdas);
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    const double r = ratio(results[i].lhs, results[i].rhs_base);
                    sup[gi] = std::max(sup[gi], r);
                    rep.rows.add({cell(f), cell(cfg.grids[gi]), cell(alpha), cell(s), cell(lambdas[i]),
                                  cell(results[i].lhs), cell(results[i].rhs_base), cell(r)});
                }
            }
            const double gr = growth(sup.front(), sup.back());
            const bool ok = std::isfinite(sup.front()) && std::isfinite(sup.back()) && gr <= 2.0;
            rep.pass = rep.pass && ok;
            rep.summary.add({cell(f), cell(alpha), cell(s), cell(cfg.grids.front()), cell(cfg.grids.back()),
                             cell(sup.front()), cell(sup.back()), cell(gr), verdict(ok)});
        }
    }
    return rep;
}

// ---------------------------------------------------------------- suites

std::vector<InstanceSpec> good_lambda_suite(std::uint64_t seed) {
    std::vector<InstanceSpec> out;
    int n = 0;
    for (double p : {2.0, 3.0})
        for (double gamma : {0.0, 1.0}) {
            InstanceSpec s;
            s.id = "gl" + std::to_string(n++);
            s.p = p;
            s.gamma = gamma;
            s.F_amplitude = 0.5;
            s.g_value = 1.0;
            s.obstacles = ObstacleModel::active;
            s.seed = seed + n;
            out.push_back(s);
        }
    return out;
}

std::vector<ExperimentCase> norm_ratio_suite(std::uint64_t seed) {
    std::vector<ExperimentCase> out;
    Rng rng(seed);
    const double ps[] = {1.8, 2.0, 3.0};
    const CoefficientModel coeffs[] = {CoefficientModel::constant, CoefficientModel::x1_layers,
                                       CoefficientModel::x2_osc};
    for (int n = 0; n < 10; ++n) {
        InstanceSpec s;
        s.id = "nr" + std::to_string(n);
        s.p = ps[n % 3];
        s.gamma = (n / 3) % 2 == 0 ? 0.0 : 1.0;
        s.coefficient = coeffs[rng.below(3)];
        s.F_amplitude = rng.uniform(0.2, 1.0);
        s.g_value = rng.uniform(0.5, 2.0);
        s.obstacles = rng.below(2) == 0 ? ObstacleModel::inactive : ObstacleModel::active;
        s.domain = n % 4 == 3 ? DomainKind::reifenberg : DomainKind::square;
        s.seed = seed * 100 + n;
        out.push_back({s, n % 2 == 0 ? 0.0 : 0.5});
    }
    for (int n = 0; n < 2; ++n) {
        InstanceSpec s;
        s.id = "pinched" + std::to_string(n);
        s.p = n == 0 ? 2.0 : 3.0;
        s.gamma = n == 0 ? 0.0 : 1.0;
        s.F_amplitude = 0.3;
        s.obstacles = ObstacleModel::pinched;
        s.domain = n == 0 ? DomainKind::square : DomainKind::reifenberg;
        s.seed = seed * 100 + 50 + n;
        out.push_back({s, n == 0 ? 0.0 : 0.5});
    }
    return out;
}

std::vector<InstanceSpec> chain_suite(std::uint64_t seed) {
    struct Row {
        double p;
        CoefficientModel a;
        DomainKind d;
        ObstacleModel o;
    };
    const Row rows[] = {
        {2.0, CoefficientModel::constant, DomainKind::square, ObstacleModel::active},
        {2.0, CoefficientModel::x1_layers, DomainKind::square, ObstacleModel::active},
        {3.0, CoefficientModel::x2_osc, DomainKind::reifenberg, ObstacleModel::active},
        {1.8, CoefficientModel::x1_layers, DomainKind::reifenberg, ObstacleModel::inactive},
        {3.0, CoefficientModel::constant, DomainKind::square, ObstacleModel::inactive},
        {2.0, CoefficientModel::x2_osc, DomainKind::reifenberg, ObstacleModel::active},
    };
    std::vector<InstanceSpec> out;
    int n = 0;
    for (const Row& r : rows) {
        InstanceSpec s;
        s.id = "ch" + std::to_string(n);
        s.p = r.p;
        s.coefficient = r.a;
        s.domain = r.d;
        s.obstacles = r.o;
        s.F_amplitude = 0.5;
        s.g_value = 1.0;
        s.seed = seed * 10 + n;
        ++n;
        out.push_back(s);
    }
    return out;
}

} // namespace reglab
