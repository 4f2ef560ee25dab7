#include <doctest.h>

#include "reglab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace reglab;

TEST_CASE("growth convention") {
    CHECK(growth(0.0, 0.0) == 1.0);
    CHECK(std::isinf(growth(0.0, 1.0)));
    CHECK(growth(2.0, 3.0) == 1.5);
}

TEST_CASE("suites are seeded") {
    CHECK(good_lambda_suite(1).size() == 4u);
    CHECK(chain_suite(1).size() == 6u);
    const auto a = norm_ratio_suite(3), b = norm_ratio_suite(3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].instance.F_amplitude == b[i].instance.F_amplitude);
}

TEST_CASE("good-lambda report layout") {
    GoodLambdaConfig cfg;
    cfg.grids = {16, 32};
    cfg.lambda_knots = 8;
    cfg.epsilons = {0.1};
    cfg.alphas = {0.5};
    std::vector<InstanceSpec> inst{good_lambda_suite(1)[1]};
    const ExperimentReport r = run_good_lambda(inst, cfg);
    for (const char* col : {"instance_id", "grid", "p", "alpha", "gamma", "epsilon", "sigma", "lambda", "lhs", "rhs1",
                            "rhs2", "C_emp", "verdict"})
        CHECK_NOTHROW(r.rows.column(col));
    CHECK(r.rows.rows().size() == 2u * 3u * 8u);
    CHECK(r.summary.rows().size() == 1u);

    const auto dir = std::filesystem::temp_directory_path() / "reglab_unit_report";
    std::filesystem::remove_all(dir);
    const std::string path = write_report(r, dir.string());
    CHECK(std::filesystem::exists(path));
    CHECK(std::filesystem::exists(dir / "goodlambda_summary.csv"));
    CHECK(std::filesystem::exists(dir / ("goodlambda_" + inst[0].id + ".svg")));
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header.rfind("instance_id,grid,p,alpha,gamma,epsilon,sigma,lambda,lhs,rhs1,rhs2,C_emp,verdict", 0) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("zero instance makes the good-lambda check vacuous") {
    InstanceSpec z;
    z.g_value = 0.0;
    GoodLambdaConfig cfg;
    cfg.grids = {16, 32};
    const ExperimentReport r = run_good_lambda({z}, cfg);
    CHECK(r.pass);
    CHECK(!r.notes.empty());
}

TEST_CASE("comparison chain on a layered coefficient") {
    InstanceSpec s = chain_suite(1)[1];
    REQUIRE(s.coefficient == CoefficientModel::x1_layers);
    ChainConfig cfg;
    cfg.grids = {32};
    const ExperimentReport r = run_comparison_chain({s}, cfg);
    CHECK(r.pass);
    const std::size_t delta = r.rows.column("delta_emp"), diff = r.rows.column("max_grad_v_minus_V");
    for (const auto& row : r.rows.rows()) {
        CHECK(std::stod(row[delta]) == 0.0);
        CHECK(std::stod(row[diff]) <= 1e-10);
    }
}

TEST_CASE("pinched instances are dominated nodewise") {
    NormRatioConfig cfg;
    cfg.grids = {16, 32};
    cfg.phi = YoungFunction::power(2.0);
    std::vector<ExperimentCase> pinched;
    for (const ExperimentCase& c : norm_ratio_suite(1))
        if (c.instance.obstacles == ObstacleModel::pinched) pinched.push_back(c);
    REQUIRE(pinched.size() == 2u);
    const ExperimentReport r = run_norm_ratio(pinched, cfg);
    const std::size_t col = r.rows.column("gradient_ratio");
    for (const auto& row : r.rows.rows()) CHECK(std::stod(row[col]) <= 1.0 + 1e-12);
}

TEST_CASE("weak type sweep is refinement stable") {
    WeakTypeConfig cfg;
    cfg.fields = 3;
    cfg.grids = {16, 32};
    CHECK(run_weak_type(cfg).pass);
}

TEST_CASE("good-lambda on a smooth instance") {
    InstanceSpec s;
    s.id = "smooth";
    GoodLambdaConfig cfg;
    cfg.alphas = {0.0};
    const ExperimentReport r = run_good_lambda({s}, cfg);
    CHECK(r.pass);
    const std::size_t lam = r.rows.column("lambda"), lhs = r.rows.column("lhs"), a = r.rows.column("alpha");
    // Knots reach the top of the maximal function, where the super-level set is empty.
    double top = 0.0;
    for (const auto& row : r.rows.rows()) top = std::max(top, std::stod(row[lam]));
    for (const auto& row : r.rows.rows()) {
        CHECK(std::stod(row[a]) == 0.0);
        if (std::stod(row[lam]) == top) CHECK(std::stod(row[lhs]) == 0.0);
    }
}
