#include <doctest.h>

#include "reglab/common.hpp"
#include "reglab/geometry.hpp"

#include <cmath>

using namespace reglab;

TEST_CASE("grid arithmetic and indexing") {
    const Grid g = build_grid(32, 1.0);
    CHECK(g.spacing() == 0.03125);
    CHECK(g.node_count() == 33u * 33u);
    CHECK(build_grid(4, 2.0).spacing() == 0.5);
    CHECK_THROWS_AS(build_grid(3, 1.0), Error);
    CHECK_THROWS_AS(build_grid(8, -1.0), Error);
    for (std::size_t k : {std::size_t{0}, std::size_t{40}, g.node_count() - 1}) {
        CHECK(g.index(g.column(k), g.row(k)) == k);
        CHECK(g.nearest_node(g.node(k)) == k);
    }
    CHECK(g.nearest_node({-3.0, 7.0}) == g.index(0, 32));
}

TEST_CASE("square domain counts") {
    const Grid g = build_grid(16, 1.0);
    const Domain d = make_domain(g, DomainKind::square, 0.0, 1.0, 0);
    CHECK(interior_cells(d).size() == 15u * 15u);
    // Frame nodes with an interior 4-neighbour: every frame node except the corners.
    CHECK(d.boundary_nodes.size() == 4u * 15u);
    CHECK(measure_flatness(d, 1.0) <= 2.0 * g.spacing());
}

TEST_CASE("rough domain flatness grows with delta") {
    const Grid g = build_grid(64, 1.0);
    const double f0 = measure_flatness(make_domain(g, DomainKind::reifenberg, 0.0, 0.5, 3), 0.5);
    const double f2 = measure_flatness(make_domain(g, DomainKind::reifenberg, 0.2, 0.5, 3), 0.5);
    CHECK(f0 <= 2.0 * g.spacing() / 0.5);
    CHECK(f2 > f0);
    CHECK(f2 < 0.5);
    CHECK_THROWS_AS(make_domain(g, DomainKind::reifenberg, 0.6, 0.5, 1), Error);
}

TEST_CASE("fixed finest scale gives one profile across resolutions") {
    const Domain a = make_domain(build_grid(32, 1.0), DomainKind::reifenberg, 0.2, 0.5, 5, 1.0 / 16);
    const Domain b = make_domain(build_grid(64, 1.0), DomainKind::reifenberg, 0.2, 0.5, 5, 1.0 / 16);
    // Every coarse boundary sample reappears at the same abscissa on the fine grid.
    for (std::size_t i = 0; i < a.boundary_points.size(); ++i) {
        const Point pa = a.boundary_points[i], pb = b.boundary_points[2 * i + 1];
        CHECK(pa.x == doctest::Approx(pb.x));
        CHECK(pa.y == pb.y);
    }
}

TEST_CASE("ball membership matches a direct distance filter") {
    const Grid g = build_grid(32, 1.0);
    const Domain d = make_domain(g, DomainKind::reifenberg, 0.1, 0.5, 2);
    const Ball b{{0.41, 0.3}, 0.27};
    std::size_t inside = 0, inside_domain = 0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (distance2(g.node(k), b.center) < b.radius * b.radius) {
            ++inside;
            inside_domain += d.is_interior(k);
        }
    }
    CHECK(cells_in_ball(g, b).size() == inside);
    CHECK(cells_in_ball(d, b, true).size() == inside_domain);
    CHECK(cells_in_ball(d, b, false).size() == inside);
    CHECK(cells_in_ball(g, {{5.0, 5.0}, g.spacing()}).empty());
}

TEST_CASE("cell sets and measure") {
    const Grid g = build_grid(20, 2.0);
    CHECK(all_cells(g).size() == 400u);
    CHECK(all_nodes(g).size() == g.node_count());
    CHECK(measure(g, all_cells(g)) == doctest::Approx(4.0));
}
