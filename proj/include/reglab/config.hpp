#pragma once

#include "reglab/common.hpp"
#include "reglab/experiments.hpp"
#include "reglab/instances.hpp"
#include "reglab/norms.hpp"
#include "reglab/operators.hpp"
#include "reglab/solver.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reglab {

/// Malformed, unknown or missing configuration; the CLI maps it to exit 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct ConfigValue {
    enum class Kind { boolean, number, string, array };
    Kind kind = Kind::number;
    bool boolean = false;
    double number = 0.0;
    std::string text;
    std::vector<ConfigValue> items;
};

/// Flat document keyed by "section.key" (top-level keys have no prefix).
using ConfigDocument = std::map<std::string, ConfigValue>;

/// Subset of TOML: comments, [section] headers, key = value with basic
/// strings, numbers (including inf), booleans and flat or nested arrays.
ConfigDocument parse_toml(const std::string& text);
ConfigDocument load_toml(const std::string& path);

/// Rejects unknown keys and type mismatches.
void validate(const ConfigDocument& doc);

struct RunConfig {
    std::uint64_t seed = 1;
    std::string out;
    int jobs = 1;

    InstanceSpec instance;
    std::optional<std::string> mask_path;
    SolverConfig solver;

    double alpha = 0.0;
    double beta = 1.0;
    MaximalMode mode = MaximalMode::fast;
    std::optional<std::string> input_field;

    LorentzParams lorentz;
    std::optional<YoungFunction> phi;

    GoodLambdaConfig good_lambda;
    std::vector<int> grids{32, 64};
    double t = 1.0;
    int sample_points = 64;
    double ball_radius = 0.3;

    double bmo_radius = 0.25;
    int bmo_probes = 16;
    int ainf_subsets = 32;
};

/// Validates, checks that every key in `required` is present, and fills a RunConfig.
RunConfig build_run_config(const ConfigDocument& doc, std::span<const std::string> required);

/// Keys accepted by validate(), with a one-line description, for --help and the README.
const std::vector<std::pair<std::string, std::string>>& config_schema();

} // namespace reglab
