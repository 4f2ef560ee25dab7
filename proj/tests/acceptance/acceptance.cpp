// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "reglab/common.hpp"
#include "reglab/experiments.hpp"
#include "reglab/field.hpp"
#include "reglab/norms.hpp"
#include "reglab/operators.hpp"
#include "reglab/reference.hpp"
#include "reglab/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace reglab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s; %.1f s of %.0f s%s\n", pass ? "PASS" : "FAIL", id, title, out.detail.c_str(),
                secs, budget_seconds, in_time ? "" : " (over budget)");
    std::fflush(stdout);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ScalarField random_field(const Grid& g, Rng& rng, double lo = 0.0, double hi = 1.0) {
    ScalarField f(g);
    for (double& v : f.values) v = rng.uniform(lo, hi);
    return f;
}

// Series solution of -Laplace u = 1 on the unit square with zero boundary values.
double poisson_series(Point x, int terms) {
    double u = 0.0;
    for (int m = 1; m <= terms; m += 2)
        for (int n = 1; n <= terms; n += 2)
            u += 16.0 / (std::pow(kPi, 4) * m * n * (m * m + n * n)) * std::sin(m * kPi * x.x) * std::sin(n * kPi * x.y);
    return u;
}

double max_error_vs_series(int grid) {
    InstanceSpec s;
    s.grid = grid;
    s.g_value = 1.0;
    const Solution sol = solve_double_obstacle(assemble(build_problem(s)));
    const Grid& g = sol.u.grid;
    double err = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) err = std::max(err, std::abs(sol.u[k] - poisson_series(g.node(k), 301)));
    return err;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

bool same_directory_contents(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why) {
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
        ++files;
        const auto other = b / entry.path().filename();
        if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other)) {
            why = entry.path().filename().string() + " differs";
            return false;
        }
    }
    why = std::to_string(files) + " files identical";
    return files > 0;
}

Outcome summary_outcome(const ExperimentReport& r) {
    std::size_t fails = 0;
    for (const auto& row : r.summary.rows()) fails += row.back() == "FAIL";
    return {r.pass, std::to_string(r.summary.rows().size() - fails) + "/" + std::to_string(r.summary.rows().size()) +
                        " summary rows PASS"};
}

} // namespace

int main() {
    criterion(1, "maximal function fast vs brute", 30, [] {
        Rng rng(101);
        double worst = 0.0;
        int cases = 0;
        for (int n : {16, 32}) {
            const Grid g = build_grid(n, 1.0);
            const RadiusFamily radii = dyadic_radii(g);
            for (int f = 0; f < 20; ++f) {
                const ScalarField field = random_field(g, rng, -1.0, 1.0);
                for (double alpha : {0.0, 0.5, 1.0}) {
                    const ScalarField a = frac_maximal(field, alpha, radii, MaximalMode::fast);
                    const ScalarField b = frac_maximal(field, alpha, radii, MaximalMode::brute);
                    const double scale = max_abs(b);
                    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]) / scale);
                    ++cases;
                }
            }
        }
        return Outcome{worst <= 1e-12, std::to_string(cases) + " cases, max relative difference " + num(worst)};
    });

    criterion(2, "Riesz potential of the unit disk", 20, [] {
        const Grid g = build_grid(128, 2.0);
        const Point c{1.0, 1.0};
        const ScalarField f = sample(g, [&](Point x) { return distance2(x, c) < 1.0 ? 1.0 : 0.0; });
        const double v = riesz_at(f, 1.0, c);
        const double rel = std::abs(v - 2.0 * kPi) / (2.0 * kPi);
        return Outcome{rel <= 0.03, "I_1 = " + num(v) + ", relative error " + num(rel)};
    });

    criterion(3, "Lorentz norm with q = s equals weighted L^q", 20, [] {
        Rng rng(303);
        const Grid g = build_grid(32, 1.0);
        const CellSet cells = all_cells(g);
        const Weight weights[] = {constant_weight(g), power_weight(g, {0.5, 0.5}, 1.0)};
        double worst = 0.0;
        for (const Weight& w : weights)
            for (int f = 0; f < 20; ++f) {
                const ScalarField field = random_field(g, rng, -2.0, 2.0);
                const double q = rng.uniform(1.2, 4.0);
                double direct = 0.0;
                for (std::size_t k : cells) direct += w.values[k] * std::pow(std::abs(field[k]), q) * g.spacing() * g.spacing();
                direct = std::pow(direct, 1.0 / q);
                const double v = lorentz_norm(field, w, cells, {q, q});
                worst = std::max(worst, std::abs(v - direct) / direct);
            }
        return Outcome{worst <= 0.01, "40 cases, max relative difference " + num(worst)};
    });

    criterion(4, "Luxemburg norm of a power Young function", 20, [] {
        Rng rng(404);
        const Grid g = build_grid(32, 1.0);
        const CellSet cells = all_cells(g);
        double worst = 0.0;
        for (int c = 0; c < 10; ++c) {
            const ScalarField field = random_field(g, rng, -3.0, 3.0);
            const double p = rng.uniform(1.2, 3.5), q = rng.uniform(1.0, 3.0), s = rng.uniform(1.0, 3.0);
            const Weight w = c % 2 ? power_weight(g, {0.5, 0.5}, 0.5) : constant_weight(g);
            const double lux = luxemburg_norm(field, w, cells, YoungFunction::power(p), {q, s});
            const double ref = std::pow(lorentz_norm(abs_pow(field, p), w, cells, {q, s}), 1.0 / p);
            worst = std::max(worst, std::abs(lux - ref) / ref);
        }
        return Outcome{worst <= 1e-6, "10 cases, max relative difference " + num(worst)};
    });

    criterion(5, "solver correctness", 120, [] {
        InstanceSpec s;
        s.grid = 32;
        s.g_value = 1.0;
        const ProblemSpec pr = build_problem(s);
        const Solution sol = solve_double_obstacle(assemble(pr));
        const double rel = relative_l2(sol.u, poisson_direct(pr.domain, pr.g));

        const double e32 = max_error_vs_series(32), e64 = max_error_vs_series(64);
        const double order = std::log2(e32 / e64);

        InstanceSpec pin = s;
        pin.obstacles = ObstacleModel::pinched;
        pin.F_amplitude = 0.5;
        pin.p = 3.0;
        const DiscreteProblem dpin = assemble(build_problem(pin));
        const Solution spin = solve_double_obstacle(dpin);
        double pin_err = 0.0;
        for (std::size_t k = 0; k < spin.u.size(); ++k) pin_err = std::max(pin_err, std::abs(spin.u[k] - dpin.spec.psi1[k]));

        InstanceSpec zero = s;
        zero.g_value = 0.0;
        zero.p = 1.8;
        const Solution szero = solve_double_obstacle(assemble(build_problem(zero)));

        const bool ok = rel <= 1e-7 && order >= 1.8 && pin_err == 0.0 && max_abs(szero.u) == 0.0;
        return Outcome{ok, "relative L2 " + num(rel) + ", order " + num(order) + ", pinched error " + num(pin_err) +
                               ", zero-data max " + num(max_abs(szero.u))};
    });

    // Criteria 6 and 7 share one run of the comparison chain; its time counts against criterion 6.
    ExperimentReport chain;
    bool chain_ok = false;
    std::string chain_error = "chain did not run";

    criterion(6, "comparison chain facts", 300, [&] {
        try {
            chain = run_comparison_chain(chain_suite(1), ChainConfig{});
            chain_ok = true;
        } catch (const std::exception& e) {
            chain_error = e.what();
            return Outcome{false, chain_error};
        }
        const std::size_t facts = chain.summary.column("facts"), x1 = chain.summary.column("x1_check");
        int bad = 0;
        for (const auto& row : chain.summary.rows()) bad += row[facts] != "PASS" || row[x1] != "PASS";
        return Outcome{bad == 0 && !chain.solver_failure, std::to_string(chain.summary.rows().size() - bad) + "/" +
                                                              std::to_string(chain.summary.rows().size()) +
                                                              " balls satisfy the facts"};
    });

    criterion(7, "reverse Hoelder constants", 300, [&] {
        if (!chain_ok) return Outcome{false, chain_error};
        double worst = 0.0;
        bool finite = true;
        for (const auto& h : chain.summary.header()) {
            if (h.find("_growth") == std::string::npos) continue;
            const std::size_t c = chain.summary.column(h);
            for (const auto& row : chain.summary.rows()) {
                const double g = std::stod(row[c]);
                finite = finite && std::isfinite(g);
                worst = std::max(worst, g);
            }
        }
        return Outcome{finite && worst <= 2.0, "max growth " + num(worst)};
    });

    criterion(8, "good-lambda inequality", 600, [] { return summary_outcome(run_good_lambda(good_lambda_suite(1), {})); });

    criterion(9, "norm domination ratios", 600, [] {
        NormRatioConfig cfg;
        cfg.phi = YoungFunction::power(2.0);
        return summary_outcome(run_norm_ratio(norm_ratio_suite(1), cfg));
    });

    criterion(10, "pointwise Riesz ratios", 300,
              [] { return summary_outcome(run_pointwise_riesz(norm_ratio_suite(1), PointwiseConfig{})); });

    criterion(11, "weak-type bound", 60, [] { return summary_outcome(run_weak_type(WeakTypeConfig{})); });

    criterion(12, "determinism", 60, [] {
        const auto base = std::filesystem::temp_directory_path() / "reglab_determinism";
        std::filesystem::remove_all(base);
        GoodLambdaConfig gl;
        gl.grids = {16, 32};
        PointwiseConfig pw;
        pw.grids = {16, 32};
        WeakTypeConfig wt;
        wt.grids = {16, 32};
        NormRatioConfig nr;
        nr.grids = {16, 32};
        nr.phi = YoungFunction::power(2.0);
        ChainConfig ch;
        ch.grids = {32};
        for (int run = 0; run < 2; ++run) {
            const auto dir = (base / std::to_string(run)).string();
            gl.jobs = pw.jobs = nr.jobs = ch.jobs = run + 1;
            write_report(run_good_lambda(good_lambda_suite(7), gl), dir);
            write_report(run_pointwise_riesz(norm_ratio_suite(7), pw), dir);
            write_report(run_norm_ratio(norm_ratio_suite(7), nr), dir);
            write_report(run_comparison_chain(chain_suite(7), ch), dir);
            write_report(run_weak_type(wt), dir);
        }
        std::string why;
        const bool same = same_directory_contents(base / "0", base / "1", why);
        std::filesystem::remove_all(base);
        return Outcome{same, why};
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
