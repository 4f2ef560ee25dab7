#include <doctest.h>

#include "reglab/config.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace reglab;

TEST_CASE("TOML subset parsing") {
    const ConfigDocument doc = parse_toml(R"(# comment
seed = 7
out = "a \"quoted\" dir"   # trailing comment

[problem]
grid = 64
p = 2.5e0
domain = "reifenberg"

[goodlambda]
epsilons = [
  0.1, 0.05,  # wrapped
  0.02,
]
sigma_powers = [1, 2]
[norm]
s = inf
)");
    CHECK(doc.at("seed").number == 7.0);
    CHECK(doc.at("out").text == "a \"quoted\" dir");
    CHECK(doc.at("problem.grid").number == 64.0);
    CHECK(doc.at("problem.p").number == 2.5);
    REQUIRE(doc.at("goodlambda.epsilons").items.size() == 3u);
    CHECK(doc.at("goodlambda.epsilons").items[2].number == 0.02);
    CHECK(std::isinf(doc.at("norm.s").number));

    const RunConfig cfg = build_run_config(doc, std::vector<std::string>{"problem.grid"});
    CHECK(cfg.seed == 7u);
    CHECK(cfg.instance.grid == 64);
    CHECK(cfg.instance.domain == DomainKind::reifenberg);
    CHECK(cfg.good_lambda.epsilons == std::vector<double>{0.1, 0.05, 0.02});
    CHECK(cfg.good_lambda.sigma_powers == std::vector<int>{1, 2});
    CHECK(std::isinf(cfg.lorentz.s));
}

TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(parse_toml("a = \n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = \"open\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = 1 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("[problem\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = 1x\n"), ConfigError);
}

TEST_CASE("schema validation") {
    CHECK_THROWS_WITH_AS(build_run_config(parse_toml("[problem]\ngird = 3\n"), {}), doctest::Contains("problem.gird"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(build_run_config(parse_toml("seed = 1\n"), std::vector<std::string>{"problem.p"}),
                         doctest::Contains("missing config key 'problem.p'"), ConfigError);
    CHECK_THROWS_AS(build_run_config(parse_toml("[problem]\ngrid = 3.5\n"), {}), ConfigError);
    CHECK_THROWS_AS(build_run_config(parse_toml("[problem]\np = \"two\"\n"), {}), ConfigError);
    CHECK_THROWS_AS(build_run_config(parse_toml("[problem]\np = 1\n"), {}), ConfigError);
    CHECK_THROWS_AS(build_run_config(parse_toml("[problem]\ncoefficient = \"wavy\"\n"), {}), ConfigError);
    CHECK_THROWS_AS(build_run_config(parse_toml("[norm]\nphi = \"exp\"\n"), {}), ConfigError);
    for (const auto& [key, help] : config_schema()) {
        CHECK(!key.empty());
        CHECK(!help.empty());
    }
}
