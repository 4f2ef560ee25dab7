#include "reglab/operators.hpp"

#include "reglab/common.hpp"

#include <algorithm>
#include <cmath>

namespace reglab {

RadiusFamily dyadic_radii(const Grid& grid) {
    RadiusFamily fam;
    const double diag = std::sqrt(2.0) * grid.extent();
    for (double r = 2.0 * grid.spacing(); r <= diag; r *= 2.0) fam.radii.push_back(r);
    return fam;
}

namespace {

void check_alpha(double alpha) { require(alpha >= 0.0 && alpha < 2.0, "maximal: alpha must lie in [0, 2)"); }

// Half-widths of the node-centred lattice disk, row offset 0..reach.
std::vector<int> disk_half_widths(double radius_in_cells) {
    const double R2 = radius_in_cells * radius_in_cells;
    const int reach = static_cast<int>(std::ceil(radius_in_cells));
    std::vector<int> w;
    for (int dj = 0; dj <= reach; ++dj) {
        int di = -1;
        while (static_cast<double>((di + 1) * (di + 1) + dj * dj) < R2) ++di;
        if (di < 0) break;
        w.push_back(di);
    }
    return w;
}

double lattice_count(const std::vector<int>& w) {
    double c = 2.0 * w[0] + 1.0;
    for (std::size_t dj = 1; dj < w.size(); ++dj) c += 2.0 * (2.0 * w[dj] + 1.0);
    return c;
}

ScalarField maximal_brute(const ScalarField& f, double alpha, const RadiusFamily& radii) {
    const Grid& g = f.grid;
    const int m = g.nodes_per_side();
    const double h = g.spacing();
    ScalarField out(g);
    for (double r : radii.radii) {
        const double R = r / h, R2 = R * R;
        const int reach = static_cast<int>(std::ceil(R));
        const double count = lattice_count(disk_half_widths(R));
        const double scale = std::pow(r, alpha) / count;
        for (int jc = 0; jc < m; ++jc) {
            for (int ic = 0; ic < m; ++ic) {
                double sum = 0.0;
                for (int j = std::max(0, jc - reach); j <= std::min(m - 1, jc + reach); ++j) {
                    for (int i = std::max(0, ic - reach); i <= std::min(m - 1, ic + reach); ++i) {
                        const double di = i - ic, dj = j - jc;
                        if (di * di + dj * dj < R2) sum += std::abs(f[g.index(i, j)]);
                    }
                }
                double& slot = out[g.index(ic, jc)];
                slot = std::max(slot, scale * sum);
            }
        }
    }
    return out;
}

ScalarField maximal_fast(const ScalarField& f, double alpha, const RadiusFamily& radii) {
    const Grid& g = f.grid;
    const int m = g.nodes_per_side();
    const double h = g.spacing();
    // P[(j)(m+1) + i] = sum of |f| over rows < j, columns < i.
    const std::size_t stride = static_cast<std::size_t>(m) + 1;
    std::vector<long double> P(stride * stride, 0.0L);
    for (int j = 0; j < m; ++j) {
        long double row = 0.0L;
        for (int i = 0; i < m; ++i) {
            row += std::abs(f[g.index(i, j)]);
            P[(j + 1) * stride + (i + 1)] = P[j * stride + (i + 1)] + row;
        }
    }
    const auto rect = [&](int i0, int i1, int j0, int j1) -> long double {
        i0 = std::max(i0, 0);
        j0 = std::max(j0, 0);
        i1 = std::min(i1, m - 1);
        j1 = std::min(j1, m - 1);
        if (i0 > i1 || j0 > j1) return 0.0L;
        return P[(j1 + 1) * stride + (i1 + 1)] - P[j0 * stride + (i1 + 1)] - P[(j1 + 1) * stride + i0] +
               P[j0 * stride + i0];
    };

    ScalarField out(g);
    struct Run {
        int lo, hi, w;
    };
    for (double r : radii.radii) {
        const std::vector<int> w = disk_half_widths(r / h);
        const double scale = std::pow(r, alpha) / lattice_count(w);
        // Row offsets -top..top grouped into rectangles of equal half-width.
        const int top = static_cast<int>(w.size()) - 1;
        std::vector<Run> runs;
        for (int dj = -top; dj <= top; ++dj) {
            const int width = w[std::abs(dj)];
            if (!runs.empty() && runs.back().w == width) runs.back().hi = dj;
            else runs.push_back({dj, dj, width});
        }
        for (int jc = 0; jc < m; ++jc) {
            for (int ic = 0; ic < m; ++ic) {
                long double sum = 0.0L;
                for (const Run& run : runs) sum += rect(ic - run.w, ic + run.w, jc + run.lo, jc + run.hi);
                double& slot = out[g.index(ic, jc)];
                slot = std::max(slot, scale * static_cast<double>(sum));
            }
        }
    }
    return out;
}

} // namespace

ScalarField frac_maximal(const ScalarField& field, double alpha, const RadiusFamily& radii, MaximalMode mode) {
    check_alpha(alpha);
    require(!radii.radii.empty(), "maximal: empty radius family");
    return mode == MaximalMode::brute ? maximal_brute(field, alpha, radii) : maximal_fast(field, alpha, radii);
}

double ball_average(const ScalarField& field, const Ball& ball) {
    const Grid& g = field.grid;
    const double h = g.spacing();
    const double r2 = ball.radius * ball.radius;
    const int i0 = static_cast<int>(std::ceil((ball.center.x - ball.radius) / h));
    const int i1 = static_cast<int>(std::floor((ball.center.x + ball.radius) / h));
    const int j0 = static_cast<int>(std::ceil((ball.center.y - ball.radius) / h));
    const int j1 = static_cast<int>(std::floor((ball.center.y + ball.radius) / h));
    const int n = g.cells();
    double sum = 0.0, count = 0.0;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            if (distance2({i * h, j * h}, ball.center) >= r2) continue;
            count += 1.0;
            if (i >= 0 && j >= 0 && i <= n && j <= n) sum += std::abs(field[g.index(i, j)]);
        }
    }
    return count > 0.0 ? sum / count : 0.0;
}

double frac_maximal_at(const ScalarField& field, double alpha, const RadiusFamily& radii, Point at) {
    check_alpha(alpha);
    double best = 0.0;
    for (double r : radii.radii) best = std::max(best, std::pow(r, alpha) * ball_average(field, {at, r}));
    return best;
}

namespace {

void check_beta(double beta) { require(beta > 0.0 && beta < 2.0, "riesz: beta must lie in (0, 2)"); }

} // namespace

ScalarField riesz_potential(const ScalarField& field, double beta) {
    check_beta(beta);
    const Grid& g = field.grid;
    const int m = g.nodes_per_side();
    const double h = g.spacing();
    std::vector<double> kernel(static_cast<std::size_t>(m) * m);
    for (int dj = 0; dj < m; ++dj)
        for (int di = 0; di < m; ++di) {
            const double d = std::max(h * std::hypot(di, dj), 0.5 * h);
            kernel[static_cast<std::size_t>(dj) * m + di] = h * h / std::pow(d, 2.0 - beta);
        }
    std::vector<std::size_t> support;
    for (std::size_t k = 0; k < field.size(); ++k)
        if (field[k] != 0.0) support.push_back(k);

    ScalarField out(g);
    for (std::size_t x = 0; x < out.size(); ++x) {
        const int ix = g.column(x), jx = g.row(x);
        double sum = 0.0;
        for (std::size_t k : support) {
            const int di = std::abs(g.column(k) - ix), dj = std::abs(g.row(k) - jx);
            sum += field[k] * kernel[static_cast<std::size_t>(dj) * m + di];
        }
        out[x] = sum;
    }
    return out;
}

double riesz_at(const ScalarField& field, double beta, Point at) {
    check_beta(beta);
    const Grid& g = field.grid;
    const double h = g.spacing();
    double sum = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k) {
        if (field[k] == 0.0) continue;
        const double d = std::max(std::sqrt(distance2(g.node(k), at)), 0.5 * h);
        sum += field[k] * h * h / std::pow(d, 2.0 - beta);
    }
    return sum;
}

double distribution(const ScalarField& field, const Weight& weight, const Domain& domain,
                    const std::optional<Ball>& ball, double lambda) {
    require(lambda >= 0.0, "distribution: lambda must be >= 0");
    require(field.grid == domain.grid && weight.grid == domain.grid, "distribution: grid mismatch");
    const Grid& g = domain.grid;
    const double area = g.spacing() * g.spacing();
    double total = 0.0;
    if (ball) {
        for (std::size_t k : cells_in_ball(domain, *ball, true))
            if (std::abs(field[k]) > lambda) total += weight.values[k] * area;
        return total;
    }
    for (std::size_t k = 0; k < field.size(); ++k)
        if (domain.is_interior(k) && std::abs(field[k]) > lambda) total += weight.values[k] * area;
    return total;
}

std::vector<WeakTypeResult> weak_type_sweep(const ScalarField& field, double alpha, double s,
                                            std::span<const double> lambdas) {
    require(s >= 1.0, "weak type: s must be >= 1");
    require(alpha >= 0.0 && alpha * s < 2.0, "weak type: need alpha * s < 2");
    const Grid& g = field.grid;
    const double area = g.spacing() * g.spacing();
    double integral = 0.0;
    for (double v : field.values) integral += std::pow(std::abs(v), s) * area;
    const ScalarField M = frac_maximal(field, alpha, dyadic_radii(g));
    std::vector<WeakTypeResult> out;
    for (double lambda : lambdas) {
        require(lambda > 0.0, "weak type: lambda must be positive");
        WeakTypeResult r;
        for (double v : M.values)
            if (v > lambda) r.lhs += area;
        r.rhs_base = std::pow(std::pow(lambda, -s) * integral, 2.0 / (2.0 - alpha * s));
        out.push_back(r);
    }
    return out;
}

WeakTypeResult weak_type_check(const ScalarField& field, double alpha, double s, double lambda) {
    const double l[1] = {lambda};
    return weak_type_sweep(field, alpha, s, l).front();
}

LocalizationResult localization_check(const ScalarField& field, double alpha, Point xi2, Point zeta, double rho) {
    check_alpha(alpha);
    require(rho > 0.0 && distance2(zeta, xi2) < rho * rho, "localization: need |zeta - xi2| < rho");
    const RadiusFamily fam = dyadic_radii(field.grid);
    LocalizationResult res;
    RadiusFamily big;
    for (double r : fam.radii) {
        big.radii.push_back(r);
        if (r < rho) continue;
        res.restricted_sup = std::max(res.restricted_sup, std::pow(r, alpha) * ball_average(field, {zeta, r}));
        big.radii.push_back(3.0 * r);
    }
    std::sort(big.radii.begin(), big.radii.end());
    res.bound = std::pow(3.0, 2.0 - alpha) * frac_maximal_at(field, alpha, big, xi2);
    res.slack = 1.0 + 5.0 * field.grid.spacing() / rho;
    return res;
}

} // namespace reglab
