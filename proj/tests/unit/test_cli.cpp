#include <doctest.h>

#include "reglab/cli.hpp"
#include "reglab/field.hpp"
#include "reglab/instances.hpp"
#include "reglab/solver.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace reglab;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "reglab");
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    return dispatch(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path scratch() {
    const auto dir = std::filesystem::temp_directory_path() / "reglab_unit_cli";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("exit codes") {
    const auto dir = scratch();
    CHECK(run({"frobnicate"}) == 1);
    CHECK(run({}) == 1);
    CHECK(run({"solve", "--out", dir.string()}) == 1);
    CHECK(run({"solve", "--config", (dir / "missing.toml").string()}) == 1);
    std::ofstream(dir / "unknown.toml") << "[problem]\ngrid = 16\np = 2\ncolour = \"red\"\n";
    CHECK(run({"solve", "--config", (dir / "unknown.toml").string(), "--out", dir.string()}) == 1);
    std::ofstream(dir / "diverge.toml") << "[problem]\ngrid = 32\np = 3\ng_value = 1\n[solver]\nmax_iter = 3\n";
    CHECK(run({"solve", "--config", (dir / "diverge.toml").string(), "--out", dir.string()}) == 2);
}

TEST_CASE("solve writes a field that reads back bit-exactly") {
    const auto dir = scratch() / "solve";
    std::filesystem::remove_all(dir);
    CHECK(run({"solve", "--grid", "16", "--p", "3", "--out", dir.string()}) == 0);
    InstanceSpec s;
    s.grid = 16;
    s.p = 3.0;
    const Solution sol = solve_double_obstacle(assemble(build_problem(s)));
    const ScalarField back = load_field((dir / "u.field").string());
    REQUIRE(back.size() == sol.u.size());
    for (std::size_t k = 0; k < back.size(); ++k) CHECK(back[k] == sol.u[k]);
    CHECK(std::filesystem::exists(dir / "solve.csv"));
    CHECK(std::filesystem::exists(dir / "domain.mask"));
}

TEST_CASE("operator subcommands consume field files") {
    const auto dir = scratch() / "ops";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const Grid g = build_grid(16, 1.0);
    save_field((dir / "in.field").string(), sample(g, [](Point x) { return x.x * x.y; }));
    std::ofstream(dir / "op.toml") << "[operator]\ninput = \"" << (dir / "in.field").string()
                                   << "\"\nbeta = 1\n[norm]\nq = 2\ns = 2\nphi = \"power\"\nphi_p = 2\n";
    const std::string cfg = (dir / "op.toml").string();
    CHECK(run({"op-max", "--config", cfg, "--alpha", "0.5", "--out", dir.string()}) == 0);
    CHECK(run({"op-riesz", "--config", cfg, "--out", dir.string()}) == 0);
    CHECK(run({"norm", "--config", cfg, "--gamma", "1", "--out", dir.string()}) == 0);
    CHECK(run({"weight-fit", "--grid", "32", "--gamma", "1", "--out", dir.string()}) == 0);
    CHECK(run({"bmo", "--grid", "32", "--out", dir.string()}) == 0);
    for (const char* f : {"maximal.field", "riesz.field", "norm.csv", "weight_fit.csv", "bmo.csv"})
        CHECK(std::filesystem::exists(dir / f));
    const ScalarField m = load_field((dir / "maximal.field").string());
    CHECK(m.grid == g);
}
