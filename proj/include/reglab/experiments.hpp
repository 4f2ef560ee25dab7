#pragma once

#include "reglab/instances.hpp"
#include "reglab/norms.hpp"
#include "reglab/report.hpp"
#include "reglab/solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace reglab {

struct ExperimentReport {
    std::string name;
    Table rows;
    Table summary;
    /// Extra files (name, contents), e.g. SVG plots.
    std::vector<std::pair<std::string, std::string>> attachments;
    std::vector<std::string> notes;
    bool pass = true;
    bool solver_failure = false;
};

/// Writes <name>.csv, <name>_summary.csv and attachments; returns the main CSV path.
std::string write_report(const ExperimentReport& report, const std::string& directory);

/// Solved instance with the operator inputs chi_Omega |grad u|^p and chi_Omega |FF|^p.
struct SolvedInstance {
    InstanceSpec spec;
    ProblemSpec problem;
    Solution solution;
    ScalarField grad_abs; ///< chi_Omega |grad u|
    ScalarField datum;    ///< chi_Omega FF
    ScalarField grad_p;   ///< chi_Omega |grad u|^p
    ScalarField datum_p;  ///< chi_Omega FF^p
};

SolvedInstance solve_instance(const InstanceSpec& spec, const SolverConfig& config);

struct ExperimentCase {
    InstanceSpec instance;
    double alpha = 0.0;
};

struct GoodLambdaConfig {
    std::vector<double> alphas{0.0, 0.5};
    std::vector<double> epsilons{0.1, 0.05, 0.02};
    int lambda_knots = 64;
    std::vector<int> sigma_powers{1, 2, 4};
    double margin = 0.9;
    std::vector<int> grids{32, 64};
    SolverConfig solver;
    int jobs = 1;
};

ExperimentReport run_good_lambda(const std::vector<InstanceSpec>& instances, const GoodLambdaConfig& config);

struct NormRatioConfig {
    LorentzParams params{2.0, 2.0};
    std::optional<YoungFunction> phi;
    std::vector<int> grids{32, 64};
    SolverConfig solver;
    int jobs = 1;
};

ExperimentReport run_norm_ratio(const std::vector<ExperimentCase>& suite, const NormRatioConfig& config);

struct PointwiseConfig {
    double beta = 1.0;
    double t = 1.0;
    int sample_points = 64;
    std::uint64_t seed = 1;
    std::vector<int> grids{32, 64};
    SolverConfig solver;
    int jobs = 1;
};

ExperimentReport run_pointwise_riesz(const std::vector<ExperimentCase>& suite, const PointwiseConfig& config);

struct ChainConfig {
    double ball_radius = 0.3;
    std::vector<double> epsilons{0.5, 0.1};
    std::vector<double> rh_gammas{1.5, 2.0};
    std::vector<int> grids{32, 64};
    SolverConfig solver;
    int jobs = 1;
};

ExperimentReport run_comparison_chain(const std::vector<InstanceSpec>& suite, const ChainConfig& config);

struct WeakTypeConfig {
    int fields = 10;
    int lambdas = 32;
    std::vector<std::pair<double, double>> alpha_s{{0.0, 1.0}, {0.5, 1.0}, {0.5, 2.0}};
    std::vector<int> grids{32, 64};
    std::uint64_t seed = 1;
};

ExperimentReport run_weak_type(const WeakTypeConfig& config);

/// Default suites used by the CLI and the acceptance gate.
std::vector<InstanceSpec> good_lambda_suite(std::uint64_t seed);
std::vector<ExperimentCase> norm_ratio_suite(std::uint64_t seed);
std::vector<InstanceSpec> chain_suite(std::uint64_t seed);

/// Growth factor b / a with 0 / 0 = 1 and x / 0 = inf.
double growth(double a, double b);

} // namespace reglab
