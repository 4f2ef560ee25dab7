#include "reglab/common.hpp"
#include "reglab/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace reglab {

ScalarField::ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == grid.node_count(), "field: value count does not match grid");
}

ScalarField sample(const Grid& grid, const std::function<double(Point)>& fn) {
    ScalarField f(grid);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = fn(grid.node(k));
    return f;
}

VectorField sample(const Grid& grid, const std::function<Point(Point)>& fn) {
    VectorField f(grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        const Point v = fn(grid.node(k));
        f.x[k] = v.x;
        f.y[k] = v.y;
    }
    return f;
}

ScalarField restrict_to(const ScalarField& field, const Domain& domain) {
    ScalarField out(field.grid);
    for (std::size_t k = 0; k < field.size(); ++k) out[k] = domain.is_interior(k) ? field[k] : 0.0;
    return out;
}

ScalarField abs_pow(const ScalarField& field, double exponent) {
    ScalarField out(field.grid);
    for (std::size_t k = 0; k < field.size(); ++k) out[k] = std::pow(std::abs(field[k]), exponent);
    return out;
}

double max_abs(const ScalarField& field) {
    double m = 0.0;
    for (double v : field.values) m = std::max(m, std::abs(v));
    return m;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

Grid read_header(std::istream& is, const std::string& tag) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), tag + ": missing header");
    std::istringstream hs(line);
    std::string magic, version;
    int cells = 0;
    std::string extent_text;
    hs >> magic >> version >> cells >> extent_text;
    require(magic == tag && version == "v1", tag + ": bad header '" + line + "'");
    require(!hs.fail(), tag + ": malformed header '" + line + "'");
    return Grid(cells, std::stod(extent_text));
}

} // namespace

void write_field(std::ostream& os, const ScalarField& field) {
    const Grid& g = field.grid;
    os << "FIELD v1 " << g.cells() << ' ' << format_real(g.extent()) << '\n';
    for (int j = 0; j < g.nodes_per_side(); ++j) {
        for (int i = 0; i < g.nodes_per_side(); ++i) {
            if (i) os << ' ';
            os << format_real(field[g.index(i, j)]);
        }
        os << '\n';
    }
}

ScalarField read_field(std::istream& is) {
    const Grid g = read_header(is, "FIELD");
    ScalarField f(g);
    std::string token;
    for (std::size_t k = 0; k < f.size(); ++k) {
        require(static_cast<bool>(is >> token), "FIELD: truncated value list");
        char* end = nullptr;
        f[k] = std::strtod(token.c_str(), &end);
        require(end && *end == '\0', "FIELD: bad value '" + token + "'");
    }
    require(!(is >> token), "FIELD: trailing data after values");
    return f;
}

void save_field(const std::string& path, const ScalarField& field) {
    std::ofstream os(path);
    require(static_cast<bool>(os), "cannot open '" + path + "' for writing");
    write_field(os, field);
}

ScalarField load_field(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open '" + path + "'");
    return read_field(is);
}

void write_mask(std::ostream& os, const Domain& domain) {
    const Grid& g = domain.grid;
    os << "MASK v1 " << g.cells() << ' ' << format_real(g.extent()) << '\n';
    for (int j = 0; j < g.nodes_per_side(); ++j) {
        for (int i = 0; i < g.nodes_per_side(); ++i) os << (domain.interior[g.index(i, j)] ? '1' : '0');
        os << '\n';
    }
}

Domain read_mask(std::istream& is) {
    const Grid g = read_header(is, "MASK");
    std::vector<std::uint8_t> mask(g.node_count(), 0);
    std::string line;
    for (int j = 0; j < g.nodes_per_side(); ++j) {
        require(static_cast<bool>(std::getline(is, line)), "MASK: truncated rows");
        require(line.size() == static_cast<std::size_t>(g.nodes_per_side()), "MASK: row length mismatch");
        for (int i = 0; i < g.nodes_per_side(); ++i) {
            require(line[i] == '0' || line[i] == '1', "MASK: rows must contain only 0/1");
            mask[g.index(i, j)] = line[i] == '1';
        }
    }
    return domain_from_mask(g, std::move(mask));
}

void save_mask(const std::string& path, const Domain& domain) {
    std::ofstream os(path);
    require(static_cast<bool>(os), "cannot open '" + path + "' for writing");
    write_mask(os, domain);
}

Domain load_mask(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open '" + path + "'");
    return read_mask(is);
}

} // namespace reglab
