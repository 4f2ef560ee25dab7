#pragma once

#include "reglab/geometry.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace reglab {

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.node_count(), fill) {}
    ScalarField(const Grid& g, std::vector<double> v);

    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
    std::size_t size() const { return values.size(); }
};

struct VectorField {
    Grid grid;
    std::vector<double> x;
    std::vector<double> y;

    explicit VectorField(const Grid& g) : grid(g), x(g.node_count(), 0.0), y(g.node_count(), 0.0) {}
};

ScalarField sample(const Grid& grid, const std::function<double(Point)>& fn);
VectorField sample(const Grid& grid, const std::function<Point(Point)>& fn);

/// Zero the field outside the interior of the domain.
ScalarField restrict_to(const ScalarField& field, const Domain& domain);
ScalarField abs_pow(const ScalarField& field, double exponent);
double max_abs(const ScalarField& field);

// "FIELD v1 <cells_per_side> <extent>" followed by one line per grid row
// (row 0 = lowest x2), values printed with 17 significant digits.
void write_field(std::ostream& os, const ScalarField& field);
ScalarField read_field(std::istream& is);
void save_field(const std::string& path, const ScalarField& field);
ScalarField load_field(const std::string& path);

// "MASK v1 <cells_per_side> <extent>" followed by one line of '0'/'1' per row.
void write_mask(std::ostream& os, const Domain& domain);
Domain read_mask(std::istream& is);
void save_mask(const std::string& path, const Domain& domain);
Domain load_mask(const std::string& path);

/// Shortest decimal rendering that round-trips (17 significant digits).
std::string format_real(double v);

} // namespace reglab
