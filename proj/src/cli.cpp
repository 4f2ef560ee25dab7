#include "reglab/cli.hpp"

#include "reglab/config.hpp"
#include "reglab/experiments.hpp"
#include "reglab/field.hpp"
#include "reglab/operators.hpp"
#include "reglab/reference.hpp"
#include "reglab/report.hpp"
#include "reglab/selftest.hpp"
#include "reglab/weights.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

namespace reglab {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFail = 2;

struct Flags {
    std::string config;
    std::optional<int> grid;
    std::optional<double> p, alpha, gamma;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
};

ConfigValue number(double v) {
    ConfigValue c;
    c.number = v;
    return c;
}

ConfigValue text(const std::string& s) {
    ConfigValue c;
    c.kind = ConfigValue::Kind::string;
    c.text = s;
    return c;
}

std::string output_dir(const RunConfig& cfg) {
    if (!cfg.out.empty()) return cfg.out;
    if (const char* env = std::getenv("REGLAB_OUT"); env && *env) return env;
    return "reglab_out";
}

std::string in_dir(const std::string& dir, const std::string& file) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / file).string();
}

// Problem from the instance description, on a mask domain when one is given.
ProblemSpec make_problem(const RunConfig& cfg) {
    if (!cfg.mask_path) return build_problem(cfg.instance);
    const Domain mask = load_mask(*cfg.mask_path);
    InstanceSpec s = cfg.instance;
    s.grid = mask.grid.cells();
    s.domain = DomainKind::square;
    require(mask.grid.extent() == 1.0, "mask: extent must be 1");
    ProblemSpec pr = build_problem(s);
    pr.domain = mask;
    if (s.obstacles == ObstacleModel::pinched) {
        pr.psi1 = restrict_to(pr.psi1, mask);
        pr.psi2 = pr.psi1;
    }
    return pr;
}

int finish(const std::string& path, bool pass) {
    std::cout << path << '\n';
    return pass ? kOk : kFail;
}

int report(const ExperimentReport& r, const std::string& dir) {
    for (const std::string& n : r.notes) std::cerr << "note: " << n << '\n';
    if (r.solver_failure) std::cerr << "solver did not converge on at least one instance\n";
    for (const auto& row : r.summary.rows())
        if (row.back() == "FAIL") {
            std::string line;
            for (std::size_t i = 0; i < row.size(); ++i) line += (i ? " " : "") + r.summary.header()[i] + "=" + row[i];
            std::cerr << "FAIL " << line << '\n';
        }
    return finish(write_report(r, dir), r.pass);
}

int cmd_solve(const RunConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const ProblemSpec pr = make_problem(cfg);
    const DiscreteProblem dp = assemble(pr);
    const Solution sol = solve_double_obstacle(dp, cfg.solver);
    save_field(in_dir(dir, "u.field"), sol.u);
    save_mask(in_dir(dir, "domain.mask"), pr.domain);

    // Poisson benchmark: compare with the direct sparse solve.
    const InstanceSpec& s = cfg.instance;
    const bool benchmark = pr.p == 2.0 && s.obstacles == ObstacleModel::inactive && s.F_amplitude == 0.0 &&
                           s.coefficient == CoefficientModel::constant;
    std::string oracle = "nan";
    bool pass = sol.converged;
    if (benchmark) {
        const double rel = relative_l2(sol.u, poisson_direct(pr.domain, pr.g));
        oracle = cell(rel);
        pass = pass && rel <= 1e-7;
    }
    Table t({"instance_id", "grid", "p", "iterations", "kkt_residual", "energy", "converged", "oracle_rel_l2",
             "active_lower", "active_upper", "verdict"});
    t.add({s.id, cell(pr.domain.grid.cells()), cell(pr.p), cell(sol.iterations), cell(sol.kkt_residual),
           cell(energy(dp, sol.u, pr.p == 2.0 ? 0.0 : cfg.solver.mu)), cell(sol.converged ? 1 : 0), oracle,
           cell(sol.active_lower.size()), cell(sol.active_upper.size()), verdict(pass)});
    if (!sol.converged) std::cerr << "solver did not converge: residual " << format_real(sol.kkt_residual) << '\n';
    const std::string path = in_dir(dir, "solve.csv");
    t.save(path);
    return finish(path, pass);
}

int cmd_op_max(const RunConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const ScalarField f = load_field(*cfg.input_field);
    const ScalarField M = frac_maximal(f, cfg.alpha, dyadic_radii(f.grid), cfg.mode);
    save_field(in_dir(dir, "maximal.field"), M);
    Table t({"grid", "alpha", "mode", "max_value", "radii"});
    t.add({cell(f.grid.cells()), cell(cfg.alpha), cfg.mode == MaximalMode::fast ? "fast" : "brute", cell(max_abs(M)),
           cell(dyadic_radii(f.grid).radii.size())});
    const std::string path = in_dir(dir, "op_max.csv");
    t.save(path);
    return finish(path, true);
}

int cmd_op_riesz(const RunConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const ScalarField f = load_field(*cfg.input_field);
    const ScalarField I = riesz_potential(f, cfg.beta);
    save_field(in_dir(dir, "riesz.field"), I);
    Table t({"grid", "beta", "max_value"});
    t.add({cell(f.grid.cells()), cell(cfg.beta), cell(max_abs(I))});
    const std::string path = in_dir(dir, "op_riesz.csv");
    t.save(path);
    return finish(path, true);
}

int cmd_norm(const RunConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const ScalarField f = load_field(*cfg.input_field);
    const Weight w = cfg.instance.gamma == 0.0 ? constant_weight(f.grid) : power_weight(f.grid, {0.5, 0.5}, cfg.instance.gamma);
    CellSet region = all_cells(f.grid);
    if (cfg.mask_path) {
        const Domain d = load_mask(*cfg.mask_path);
        require(d.grid == f.grid, "norm: mask and field grids differ");
        region = interior_cells(d);
    }
    const double lor = lorentz_norm(f, w, region, cfg.lorentz);
    const std::string lux = cfg.phi ? cell(luxemburg_norm(f, w, region, *cfg.phi, cfg.lorentz)) : "nan";
    Table t({"grid", "gamma", "q", "s", "lorentz", "luxemburg"});
    t.add({cell(f.grid.cells()), cell(cfg.instance.gamma), cell(cfg.lorentz.q), cell(cfg.lorentz.s), cell(lor), lux});
    const std::string path = in_dir(dir, "norm.csv");
    t.save(path);
    return finish(path, true);
}

int cmd_weight_fit(const RunConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const Grid g = build_grid(cfg.instance.grid, 1.0);
    Weight w = cfg.instance.gamma == 0.0 ? constant_weight(g) : power_weight(g, {0.5, 0.5}, cfg.instance.gamma);
    const Point centers[] = {{0.5, 0.5}, {0.3, 0.6}, {0.7, 0.35}};
    const auto balls = dyadic_ball_family(centers, 4.0 * g.spacing(), 0.5);
    const AinfPair pair = estimate_Ainf(w, balls, cfg.ainf_subsets, cfg.seed);
    // Fresh samples measure how well the fitted envelope generalizes.
    const auto fresh = sample_ainf(w, balls, cfg.ainf_subsets, cfg.seed + 1);
    const double coverage = ainf_envelope_coverage(pair, fresh);
    ScalarField wf(g);
    wf.values = w.values;
    save_field(in_dir(dir, "weight.field"), wf);
    Table t({"grid", "gamma", "c0", "nu", "fresh_coverage", "Ap_2"});
    t.add({cell(g.cells()), cell(cfg.instance.gamma), cell(pair.c0), cell(pair.nu), cell(coverage),
           cell(estimate_Ap(w, 2.0, balls))});
    const std::string path = in_dir(dir, "weight_fit.csv");
    t.save(path);
    return finish(path, true);
}

int cmd_bmo(const RunConfig& cfg) {
    const std::string dir = output_dir(cfg);
    const ProblemSpec pr = build_problem(cfg.instance);
    const double v = partial_bmo_seminorm(pr.coeff, cfg.bmo_radius, cfg.bmo_probes);
    Table t({"grid", "p", "coefficient", "radius", "probes", "partial_bmo"});
    t.add({cell(cfg.instance.grid), cell(cfg.instance.p), to_string(cfg.instance.coefficient), cell(cfg.bmo_radius),
           cell(cfg.bmo_probes), cell(v)});
    const std::string path = in_dir(dir, "bmo.csv");
    t.save(path);
    return finish(path, true);
}

int cmd_goodlambda(const RunConfig& cfg) {
    return report(run_good_lambda(good_lambda_suite(cfg.seed), cfg.good_lambda), output_dir(cfg));
}

int cmd_normratio(const RunConfig& cfg) {
    NormRatioConfig c;
    c.params = cfg.lorentz;
    c.phi = cfg.phi ? cfg.phi : std::optional<YoungFunction>(YoungFunction::power(2.0));
    c.grids = cfg.grids;
    c.solver = cfg.solver;
    c.jobs = cfg.jobs;
    return report(run_norm_ratio(norm_ratio_suite(cfg.seed), c), output_dir(cfg));
}

int cmd_pointwise(const RunConfig& cfg) {
    PointwiseConfig c;
    c.beta = cfg.beta;
    c.t = cfg.t;
    c.sample_points = cfg.sample_points;
    c.seed = cfg.seed;
    c.grids = cfg.grids;
    c.solver = cfg.solver;
    c.jobs = cfg.jobs;
    return report(run_pointwise_riesz(norm_ratio_suite(cfg.seed), c), output_dir(cfg));
}

int cmd_chain(const RunConfig& cfg) {
    ChainConfig c;
    c.ball_radius = cfg.ball_radius;
    c.grids = cfg.grids;
    c.solver = cfg.solver;
    c.jobs = cfg.jobs;
    return report(run_comparison_chain(chain_suite(cfg.seed), c), output_dir(cfg));
}

int cmd_selftest(const RunConfig& cfg) {
    const SelftestResult r = run_selftest();
    for (const auto& row : r.table.rows())
        if (row.back() == "FAIL") std::cerr << "FAIL " << row[1] << "/" << row[0] << ": " << row[2] << '\n';
    const std::string path = in_dir(output_dir(cfg), "selftest.csv");
    r.table.save(path);
    return finish(path, r.pass);
}

struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> required;
    std::function<int(const RunConfig&)> run;
    bool experiment = false;
};

} // namespace

int dispatch(int argc, char** argv) {
    const std::vector<Command> commands = {
        {"solve", "solve the double-obstacle problem; writes u.field and solve.csv", {"problem.grid", "problem.p"},
         cmd_solve},
        {"op-max", "fractional maximal function of a field", {"operator.input"}, cmd_op_max},
        {"op-riesz", "Riesz potential of a field", {"operator.input"}, cmd_op_riesz},
        {"norm", "Lorentz and Luxemburg norms of a field", {"operator.input"}, cmd_norm},
        {"weight-fit", "power weight with fitted A_infinity constants", {"problem.grid"}, cmd_weight_fit},
        {"bmo", "partial BMO seminorm of the coefficient", {"problem.grid"}, cmd_bmo},
        {"exp-goodlambda", "good-lambda experiment", {}, cmd_goodlambda, true},
        {"exp-normratio", "norm ratio experiment", {}, cmd_normratio, true},
        {"exp-pointwise", "pointwise Riesz experiment", {}, cmd_pointwise, true},
        {"exp-chain", "comparison chain experiment", {}, cmd_chain, true},
        {"selftest", "closed-form checks of every module", {}, cmd_selftest},
    };

    CLI::App app{"reglab: obstacle problems, weighted maximal functions and norm experiments"};
    app.require_subcommand(1);
    std::string schema_help = "Config keys:\n";
    for (const auto& [key, help] : config_schema()) schema_help += "  " + key + ": " + help + "\n";
    app.footer(schema_help);

    Flags flags;
    std::map<CLI::App*, const Command*> by_app;
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", flags.config, "TOML config file");
        sub->add_option("--grid", flags.grid, "cells per side (experiments: coarse grid, fine = 2x)");
        sub->add_option("--p", flags.p, "growth exponent");
        sub->add_option("--alpha", flags.alpha, "fractional order");
        sub->add_option("--gamma", flags.gamma, "power-weight exponent");
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--out", flags.out, "output directory (default $REGLAB_OUT, else ./reglab_out)");
        sub->add_option("--jobs", flags.jobs, "concurrent instances");
        by_app[sub] = &c;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, std::cerr, std::cerr);
        return code == 0 ? kOk : kUsage;
    }

    const Command* cmd = nullptr;
    for (const auto& [sub, c] : by_app)
        if (sub->parsed()) cmd = c;

    RunConfig cfg;
    try {
        ConfigDocument doc = flags.config.empty() ? ConfigDocument{} : load_toml(flags.config);
        if (flags.grid) {
            doc["problem.grid"] = number(*flags.grid);
            if (cmd->experiment) {
                ConfigValue grids;
                grids.kind = ConfigValue::Kind::array;
                grids.items = {number(*flags.grid), number(2.0 * *flags.grid)};
                doc["experiment.grids"] = grids;
            }
        }
        if (flags.p) doc["problem.p"] = number(*flags.p);
        if (flags.alpha) doc["operator.alpha"] = number(*flags.alpha);
        if (flags.gamma) doc["problem.gamma"] = number(*flags.gamma);
        if (flags.seed) doc["seed"] = number(static_cast<double>(*flags.seed));
        if (flags.out) doc["out"] = text(*flags.out);
        if (flags.jobs) doc["jobs"] = number(*flags.jobs);
        cfg = build_run_config(doc, cmd->required);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        return cmd->run(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace reglab
