#include <doctest.h>

#include "reglab/common.hpp"
#include "reglab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

using namespace reglab;

namespace {

// Exhaustive (node, radius) loop over lattice offsets; the mean divides by the
// full offset count, so values outside the grid count as zero.
ScalarField maximal_oracle(const ScalarField& f, double alpha, const std::vector<double>& radii) {
    const Grid& g = f.grid;
    const int m = g.nodes_per_side();
    ScalarField out(g);
    for (int jc = 0; jc < m; ++jc)
        for (int ic = 0; ic < m; ++ic)
            for (double r : radii) {
                const double R = r / g.spacing();
                const int reach = static_cast<int>(R) + 1;
                double sum = 0.0, count = 0.0;
                for (int dj = -reach; dj <= reach; ++dj)
                    for (int di = -reach; di <= reach; ++di) {
                        if (di * di + dj * dj >= R * R) continue;
                        count += 1.0;
                        const int i = ic + di, j = jc + dj;
                        if (i >= 0 && j >= 0 && i < m && j < m) sum += std::abs(f[g.index(i, j)]);
                    }
                double& slot = out[g.index(ic, jc)];
                slot = std::max(slot, std::pow(r, alpha) * sum / count);
            }
    return out;
}

ScalarField random_field(const Grid& g, std::uint64_t seed) {
    Rng rng(seed);
    ScalarField f(g);
    for (double& v : f.values) v = rng.uniform(-1.0, 1.0);
    return f;
}

} // namespace

TEST_CASE("radius family") {
    const Grid g = build_grid(32, 1.0);
    const RadiusFamily fam = dyadic_radii(g);
    REQUIRE(!fam.radii.empty());
    CHECK(fam.radii.front() == doctest::Approx(2.0 * g.spacing()));
    CHECK(fam.radii.back() <= std::sqrt(2.0));
    CHECK(fam.radii.back() * 2.0 > std::sqrt(2.0));
}

TEST_CASE("maximal function matches the exhaustive oracle") {
    const Grid g = build_grid(16, 1.0);
    const RadiusFamily fam = dyadic_radii(g);
    ScalarField spike(g);
    spike[g.index(5, 9)] = 1.0;
    for (const ScalarField& f : {spike, random_field(g, 4)})
        for (double alpha : {0.0, 0.5, 1.5}) {
            const ScalarField ref = maximal_oracle(f, alpha, fam.radii);
            const ScalarField brute = frac_maximal(f, alpha, fam, MaximalMode::brute);
            const ScalarField fast = frac_maximal(f, alpha, fam, MaximalMode::fast);
            for (std::size_t k = 0; k < ref.size(); ++k) {
                CHECK(brute[k] == doctest::Approx(ref[k]).epsilon(1e-13));
                CHECK(fast[k] == doctest::Approx(ref[k]).epsilon(1e-12));
            }
        }
    CHECK_THROWS_AS(frac_maximal(spike, 2.0, fam), Error);
}

TEST_CASE("maximal function at an arbitrary point") {
    const Grid g = build_grid(16, 1.0);
    const RadiusFamily fam = dyadic_radii(g);
    const ScalarField f = random_field(g, 8);
    const ScalarField M = frac_maximal(f, 0.5, fam);
    const std::size_t k = g.index(7, 3);
    CHECK(frac_maximal_at(f, 0.5, fam, g.node(k)) == doctest::Approx(M[k]).epsilon(1e-12));
    CHECK(ball_average(ScalarField(g, 3.0), {{0.5, 0.5}, 0.2}) == doctest::Approx(3.0));
}

TEST_CASE("Riesz potential matches a direct double sum") {
    const Grid g = build_grid(12, 1.0);
    const ScalarField f = random_field(g, 5);
    const double beta = 0.7, h = g.spacing();
    const ScalarField I = riesz_potential(f, beta);
    for (std::size_t x : {std::size_t{0}, std::size_t{50}, g.node_count() - 1}) {
        double ref = 0.0;
        for (std::size_t y = 0; y < g.node_count(); ++y) {
            const double d = std::max(std::sqrt(distance2(g.node(x), g.node(y))), h / 2.0);
            ref += f[y] * h * h * std::pow(d, beta - 2.0);
        }
        CHECK(I[x] == doctest::Approx(ref).epsilon(1e-12));
        CHECK(riesz_at(f, beta, g.node(x)) == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK_THROWS_AS(riesz_potential(f, 2.0), Error);
}

TEST_CASE("Riesz potential of the unit disk at its centre") {
    const Grid g = build_grid(64, 2.0);
    const ScalarField f = sample(g, [](Point x) { return distance2(x, {1.0, 1.0}) < 1.0 ? 1.0 : 0.0; });
    CHECK(riesz_at(f, 1.0, {1.0, 1.0}) == doctest::Approx(2.0 * std::numbers::pi).epsilon(0.05));
}

TEST_CASE("distribution matches a filter-and-sum oracle") {
    const Grid g = build_grid(32, 1.0);
    const Domain d = make_domain(g, DomainKind::reifenberg, 0.1, 0.5, 6);
    const Weight w = power_weight(g, {0.5, 0.5}, 1.0);
    const ScalarField f = random_field(g, 11);
    const Ball b{{0.4, 0.6}, 0.3};
    for (double lambda : {0.0, 0.2, 0.7}) {
        double all = 0.0, local = 0.0;
        for (std::size_t k = 0; k < g.node_count(); ++k) {
            if (!d.is_interior(k) || std::abs(f[k]) <= lambda) continue;
            const double m = w.values[k] * g.spacing() * g.spacing();
            all += m;
            if (distance2(g.node(k), b.center) < b.radius * b.radius) local += m;
        }
        CHECK(distribution(f, w, d, std::nullopt, lambda) == doctest::Approx(all).epsilon(1e-12));
        CHECK(distribution(f, w, d, b, lambda) == doctest::Approx(local).epsilon(1e-12));
    }
    CHECK(distribution(f, w, d, std::nullopt, 1.0) == 0.0);
}

TEST_CASE("weak type sweep of a single-node indicator stays bounded") {
    const Grid g = build_grid(32, 1.0);
    ScalarField f(g);
    f[g.index(16, 16)] = 1.0;
    const double top = max_abs(frac_maximal(f, 0.0, dyadic_radii(g)));
    std::vector<double> lambdas;
    for (int i = 0; i < 16; ++i) lambdas.push_back(top * std::pow(0.7, i));
    double sup = 0.0;
    for (const WeakTypeResult& r : weak_type_sweep(f, 0.0, 1.0, lambdas)) {
        CHECK(r.rhs_base > 0.0);
        sup = std::max(sup, r.lhs / r.rhs_base);
    }
    CHECK(sup < 20.0);
    const WeakTypeResult one = weak_type_check(f, 0.0, 1.0, lambdas[3]);
    CHECK(one.lhs == weak_type_sweep(f, 0.0, 1.0, std::vector<double>{lambdas[3]})[0].lhs);
    CHECK_THROWS_AS(weak_type_check(f, 1.0, 2.0, 0.1), Error);
}

TEST_CASE("localization bound on random admissible configurations") {
    const Grid g = build_grid(32, 1.0);
    Rng rng(21);
    for (int c = 0; c < 12; ++c) {
        ScalarField f(g);
        for (double& v : f.values) v = rng.uniform() < 0.1 ? rng.uniform(0.0, 5.0) : 0.0;
        const double rho = rng.uniform(0.07, 0.3);
        const Point xi{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)};
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi), s = rng.uniform(0.0, 0.99) * rho;
        const Point zeta{xi.x + s * std::cos(t), xi.y + s * std::sin(t)};
        const LocalizationResult r = localization_check(f, rng.uniform(0.0, 1.5), xi, zeta, rho);
        CHECK(r.holds());
    }
    CHECK_THROWS_AS(localization_check(ScalarField(g), 0.0, {0.5, 0.5}, {0.9, 0.5}, 0.1), Error);
}

TEST_CASE("maximal function of a constant away from the edge") {
    const Grid g = build_grid(32, 1.0);
    const ScalarField m = frac_maximal(ScalarField(g, 2.5), 0.0, dyadic_radii(g));
    const double diag = std::sqrt(2.0);
    for (std::size_t k = 0; k < m.size(); ++k) {
        const Point x = g.node(k);
        const double edge = std::min({x.x, x.y, 1.0 - x.x, 1.0 - x.y});
        if (edge >= diag / 4.0) CHECK(m[k] == doctest::Approx(2.5).epsilon(1e-14));
    }
    CHECK(max_abs(frac_maximal(ScalarField(g), 0.7, dyadic_radii(g))) == 0.0);
    CHECK(max_abs(riesz_potential(ScalarField(g), 1.0)) == 0.0);
}

TEST_CASE("Riesz potential is invariant under a quarter turn") {
    const Grid g = build_grid(32, 1.0);
    const int n = g.nodes_per_side() - 1;
    const ScalarField f = sample(g, [](Point x) { return std::exp(-20.0 * distance2(x, {0.5, 0.5})); });
    const ScalarField r = riesz_potential(f, 1.0);
    const double scale = max_abs(r);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) CHECK(std::abs(r[g.index(i, j)] - r[g.index(n - j, i)]) <= 1e-12 * scale);
}

TEST_CASE("weak type check is jointly homogeneous") {
    const Grid g = build_grid(32, 1.0);
    const ScalarField f = random_field(g, 8);
    ScalarField f2 = f;
    for (double& v : f2.values) v *= 2.0;
    for (double lambda : {0.05, 0.2, 0.6}) {
        const WeakTypeResult a = weak_type_check(f, 0.0, 1.0, lambda), b = weak_type_check(f2, 0.0, 1.0, 2.0 * lambda);
        CHECK(b.lhs == doctest::Approx(a.lhs).epsilon(1e-14));
        CHECK(b.rhs_base == doctest::Approx(a.rhs_base).epsilon(1e-14));
    }
    const WeakTypeResult z = weak_type_check(ScalarField(g), 0.0, 1.0, 0.1);
    CHECK(z.lhs == 0.0);
}
