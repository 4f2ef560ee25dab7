#include "reglab/geometry.hpp"

#include "reglab/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace reglab {

Grid::Grid(int cells_per_side, double extent)
    : cells_(cells_per_side), extent_(extent), spacing_(extent / cells_per_side) {
    require(cells_per_side >= 4, "grid: cells_per_side must be >= 4, got " + std::to_string(cells_per_side));
    require(extent > 0.0 && std::isfinite(extent), "grid: extent must be positive");
}

std::size_t Grid::nearest_node(Point p) const {
    const auto clampi = [&](double v) {
        return std::clamp(static_cast<int>(std::lround(v / spacing_)), 0, cells_);
    };
    return index(clampi(p.x), clampi(p.y));
}

Grid build_grid(int cells_per_side, double extent) { return Grid(cells_per_side, extent); }

std::size_t Domain::interior_count() const {
    return static_cast<std::size_t>(std::count(interior.begin(), interior.end(), std::uint8_t{1}));
}

namespace {

// Boundary nodes: exterior nodes with an interior 4-neighbour.
std::vector<std::size_t> collect_boundary(const Grid& grid, const std::vector<std::uint8_t>& interior) {
    std::vector<std::size_t> out;
    const int m = grid.nodes_per_side();
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const std::size_t k = grid.index(i, j);
            if (interior[k]) continue;
            const bool touches = (i > 0 && interior[grid.index(i - 1, j)]) ||
                                 (i + 1 < m && interior[grid.index(i + 1, j)]) ||
                                 (j > 0 && interior[grid.index(i, j - 1)]) ||
                                 (j + 1 < m && interior[grid.index(i, j + 1)]);
            if (touches) out.push_back(k);
        }
    }
    return out;
}

// Triangle wave with period 1 and range [-1, 1].
double triangle_wave(double t) {
    const double f = t - std::floor(t);
    return 4.0 * std::abs(f - 0.5) - 1.0;
}

constexpr double kAmplitudeFraction = 0.25;

} // namespace

double reifenberg_profile(double x, double extent, double delta, double r0, double finest_scale, std::uint64_t seed) {
    Rng rng(seed);
    double y = 0.25 * extent;
    for (double rho = r0; rho >= finest_scale; rho *= 0.5) {
        const double phase = rng.uniform();
        y += kAmplitudeFraction * delta * rho * triangle_wave(x / rho + phase);
    }
    return y;
}

Domain make_domain(const Grid& grid, DomainKind kind, double delta, double r0, std::uint64_t seed,
                   double finest_scale) {
    require(delta >= 0.0 && delta < 0.5, "domain: delta must lie in [0, 1/2)");
    require(r0 > 0.0 && r0 <= grid.extent(), "domain: r0 must lie in (0, extent]");
    require(kind != DomainKind::mask, "domain: use domain_from_mask for mask domains");

    const int n = grid.cells();
    const double h = grid.spacing();
    Domain d{grid, std::vector<std::uint8_t>(grid.node_count(), 0), {}, {}, r0, delta, kind, seed};

    if (kind == DomainKind::square) {
        for (int j = 1; j < n; ++j)
            for (int i = 1; i < n; ++i) d.interior[grid.index(i, j)] = 1;
        // Frame boundary only; no boundary points off the frame.
    } else {
        std::vector<double> profile(static_cast<std::size_t>(n + 1));
        const double finest = finest_scale > 0.0 ? std::max(finest_scale, 2.0 * h) : 2.0 * h;
        for (int i = 0; i <= n; ++i) profile[i] = reifenberg_profile(i * h, grid.extent(), delta, r0, finest, seed);
        const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
        require(*lo > h && *hi < grid.extent() - 2.0 * h,
                "domain: rough boundary perturbation leaves the grid extent");
        for (int j = 1; j < n; ++j)
            for (int i = 1; i < n; ++i)
                if (j * h > profile[i]) d.interior[grid.index(i, j)] = 1;
        for (int i = 1; i < n; ++i) d.boundary_points.push_back({i * h, profile[i]});
    }
    d.boundary_nodes = collect_boundary(grid, d.interior);
    return d;
}

Domain domain_from_mask(const Grid& grid, std::vector<std::uint8_t> interior, double r0) {
    require(interior.size() == grid.node_count(), "mask: size does not match grid");
    for (std::size_t k = 0; k < interior.size(); ++k) {
        interior[k] = (interior[k] != 0 && !grid.on_frame(k)) ? 1 : 0;
    }
    Domain d{grid, std::move(interior), {}, {}, r0 > 0.0 ? r0 : grid.extent(), 0.0, DomainKind::mask, 0};
    d.boundary_nodes = collect_boundary(grid, d.interior);
    for (std::size_t k : d.boundary_nodes)
        if (!grid.on_frame(k)) d.boundary_points.push_back(grid.node(k));
    return d;
}

double measure_flatness(const Domain& domain, double r0) {
    const double h = domain.grid.spacing();
    require(r0 >= 4.0 * h, "flatness: r0 below resolution (r0 < 4h)");

    constexpr int kDirections = 180;
    std::vector<Point> normals(kDirections);
    for (int k = 0; k < kDirections; ++k) {
        const double theta = std::numbers::pi * k / kDirections;
        normals[k] = {-std::sin(theta), std::cos(theta)};
    }

    const auto& pts = domain.boundary_points;
    double worst = 0.0;
    std::vector<Point> local;
    for (const Point& xi : pts) {
        for (double rho = r0; rho >= 4.0 * h; rho *= 0.5) {
            local.clear();
            const double r2 = rho * rho;
            for (const Point& q : pts)
                if (distance2(q, xi) <= r2) local.push_back(q);
            if (local.size() < 2) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const Point& nrm : normals) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (const Point& q : local) {
                    const double t = nrm.x * q.x + nrm.y * q.y;
                    lo = std::min(lo, t);
                    hi = std::max(hi, t);
                }
                best = std::min(best, 0.5 * (hi - lo));
            }
            worst = std::max(worst, best / rho);
        }
    }
    return worst;
}

CellSet cells_in_ball(const Grid& grid, const Ball& ball) {
    CellSet out;
    const double h = grid.spacing();
    const int n = grid.cells();
    const double r = ball.radius;
    const int i0 = std::max(0, static_cast<int>(std::ceil((ball.center.x - r) / h)));
    const int i1 = std::min(n, static_cast<int>(std::floor((ball.center.x + r) / h)));
    const int j0 = std::max(0, static_cast<int>(std::ceil((ball.center.y - r) / h)));
    const int j1 = std::min(n, static_cast<int>(std::floor((ball.center.y + r) / h)));
    const double r2 = r * r;
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (distance2(grid.node(i, j), ball.center) < r2) out.push_back(grid.index(i, j));
    return out;
}

CellSet cells_in_ball(const Domain& domain, const Ball& ball, bool restrict_to_domain) {
    CellSet out = cells_in_ball(domain.grid, ball);
    if (restrict_to_domain) std::erase_if(out, [&](std::size_t k) { return !domain.is_interior(k); });
    return out;
}

CellSet all_cells(const Grid& grid) {
    CellSet out;
    out.reserve(static_cast<std::size_t>(grid.cells()) * grid.cells());
    for (int j = 0; j < grid.cells(); ++j)
        for (int i = 0; i < grid.cells(); ++i) out.push_back(grid.index(i, j));
    return out;
}

CellSet all_nodes(const Grid& grid) {
    CellSet out(grid.node_count());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = k;
    return out;
}

CellSet interior_cells(const Domain& domain) {
    CellSet out;
    for (std::size_t k = 0; k < domain.interior.size(); ++k)
        if (domain.interior[k]) out.push_back(k);
    return out;
}

double measure(const Grid& grid, const CellSet& cells) {
    return static_cast<double>(cells.size()) * grid.spacing() * grid.spacing();
}

} // namespace reglab
