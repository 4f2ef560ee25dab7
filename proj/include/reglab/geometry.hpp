#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace reglab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance2(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Uniform node grid on [0,S]^2 with (n+1)^2 nodes, stored row-major
/// (row = x2 index, column = x1 index).
class Grid {
public:
    Grid(int cells_per_side, double extent);

    int cells() const { return cells_; }
    int nodes_per_side() const { return cells_ + 1; }
    double extent() const { return extent_; }
    double spacing() const { return spacing_; }
    std::size_t node_count() const {
        return static_cast<std::size_t>(nodes_per_side()) * static_cast<std::size_t>(nodes_per_side());
    }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nodes_per_side()) +
               static_cast<std::size_t>(i);
    }
    int column(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(nodes_per_side())); }
    int row(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(nodes_per_side())); }
    Point node(int i, int j) const { return {i * spacing_, j * spacing_}; }
    Point node(std::size_t k) const { return node(column(k), row(k)); }
    bool on_frame(std::size_t k) const {
        const int i = column(k), j = row(k);
        return i == 0 || j == 0 || i == cells_ || j == cells_;
    }
    /// Nearest node to a point, clamped to the grid.
    std::size_t nearest_node(Point p) const;

    bool operator==(const Grid& other) const {
        return cells_ == other.cells_ && extent_ == other.extent_;
    }

private:
    int cells_;
    double extent_;
    double spacing_;
};

Grid build_grid(int cells_per_side, double extent);

enum class DomainKind { square, reifenberg, mask };

/// Discretized domain: interior nodes carry unknowns, boundary nodes are the
/// non-interior 4-neighbours of interior nodes. `boundary_points` samples the
/// physical boundary away from the extent frame (exact profile values for
/// generated domains, boundary node centres for masks).
struct Domain {
    Grid grid;
    std::vector<std::uint8_t> interior;
    std::vector<std::size_t> boundary_nodes;
    std::vector<Point> boundary_points;
    double r0 = 0.0;
    double delta = 0.0;
    DomainKind kind = DomainKind::square;
    std::uint64_t seed = 0;

    bool is_interior(std::size_t k) const { return interior[k] != 0; }
    std::size_t interior_count() const;
};

/// finest_scale = 0 resolves the rough profile down to 2h.
Domain make_domain(const Grid& grid, DomainKind kind, double delta, double r0, std::uint64_t seed,
                   double finest_scale = 0.0);

/// Domain from an arbitrary interior mask (frame nodes are forced exterior).
Domain domain_from_mask(const Grid& grid, std::vector<std::uint8_t> interior, double r0 = 0.0);

/// Height of the lower boundary profile used by the rough-domain generator;
/// oscillation scales r0, r0/2, ... down to finest_scale.
double reifenberg_profile(double x, double extent, double delta, double r0, double finest_scale, std::uint64_t seed);

double measure_flatness(const Domain& domain, double r0);

struct Ball {
    Point center;
    double radius = 0.0;
};

/// Sorted node indices.
using CellSet = std::vector<std::size_t>;

/// Nodes of the grid inside the open ball.
CellSet cells_in_ball(const Grid& grid, const Ball& ball);
CellSet cells_in_ball(const Domain& domain, const Ball& ball, bool restrict_to_domain);
/// One representative node (lower-left corner) per grid cell; measure = extent^2.
CellSet all_cells(const Grid& grid);
CellSet all_nodes(const Grid& grid);
CellSet interior_cells(const Domain& domain);
double measure(const Grid& grid, const CellSet& cells);

} // namespace reglab
