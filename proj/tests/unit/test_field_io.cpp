#include <doctest.h>

#include "reglab/common.hpp"
#include "reglab/field.hpp"

#include <sstream>

using namespace reglab;

TEST_CASE("field round trip is bit exact") {
    const Grid g = build_grid(8, 1.5);
    Rng rng(9);
    ScalarField f(g);
    for (double& v : f.values) v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-30.0, 30.0));
    f[3] = 0.0;
    f[4] = -0.0;
    std::stringstream ss;
    write_field(ss, f);
    const ScalarField back = read_field(ss);
    REQUIRE(back.grid == g);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(back[k] == f[k]);
}

TEST_CASE("mask round trip") {
    const Grid g = build_grid(16, 1.0);
    const Domain d = make_domain(g, DomainKind::reifenberg, 0.2, 0.5, 4);
    std::stringstream ss;
    write_mask(ss, d);
    const Domain back = read_mask(ss);
    CHECK(back.interior == d.interior);
    CHECK(back.boundary_nodes == d.boundary_nodes);
}

TEST_CASE("malformed input is rejected") {
    std::stringstream bad("FIELD v2 4 1\n");
    CHECK_THROWS_AS(read_field(bad), Error);
    std::stringstream short_rows("FIELD v1 4 1\n1 2 3 4 5\n");
    CHECK_THROWS_AS(read_field(short_rows), Error);
    std::stringstream mask("MASK v1 4 1\n00000\n01x10\n");
    CHECK_THROWS_AS(read_mask(mask), Error);
}

TEST_CASE("field helpers") {
    const Grid g = build_grid(4, 1.0);
    const Domain d = make_domain(g, DomainKind::square, 0.0, 1.0, 0);
    const ScalarField f = sample(g, [](Point x) { return x.x - 2.0 * x.y; });
    CHECK(max_abs(f) == doctest::Approx(2.0));
    const ScalarField r = restrict_to(f, d);
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(r[k] == (d.is_interior(k) ? f[k] : 0.0));
    CHECK(abs_pow(f, 2.0)[g.index(0, 4)] == doctest::Approx(4.0));
    CHECK(format_real(0.1) == "0.10000000000000001");
}
