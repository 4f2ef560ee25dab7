#include "reglab/weights.hpp"

#include "reglab/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace reglab {

Weight constant_weight(const Grid& grid, double value) {
    require(value > 0.0, "weight: constant weight must be positive");
    Weight w{grid, std::vector<double>(grid.node_count(), value), WeightKind::constant, {}, 0.0, std::nullopt};
    return w;
}

Weight power_weight(const Grid& grid, Point center, double gamma) {
    require(std::abs(gamma) < 4.0, "weight: |gamma| must be < 4");
    Weight w{grid, std::vector<double>(grid.node_count()), WeightKind::power, center, gamma, std::nullopt};
    const double floor_radius = 0.5 * grid.spacing();
    for (std::size_t k = 0; k < w.values.size(); ++k) {
        const double r = std::max(std::sqrt(distance2(grid.node(k), center)), floor_radius);
        w.values[k] = gamma == 0.0 ? 1.0 : std::pow(r, gamma);
    }
    return w;
}

double weighted_measure(const Weight& weight, const CellSet& cells) {
    const double area = weight.grid.spacing() * weight.grid.spacing();
    double sum = 0.0;
    for (std::size_t k : cells) sum += weight.values[k] * area;
    return sum;
}

std::vector<Ball> dyadic_ball_family(std::span<const Point> centers, double r_min, double r_max) {
    require(r_min > 0.0 && r_max >= r_min, "ball family: need 0 < r_min <= r_max");
    std::vector<Ball> out;
    for (const Point& c : centers)
        for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= 2.0) out.push_back({c, r});
    return out;
}

double estimate_Ap(const Weight& weight, double p, std::span<const Ball> balls) {
    require(p > 1.0, "A_p: p must exceed 1");
    require(!balls.empty(), "A_p: ball family is empty");
    const double h = weight.grid.spacing();
    const double dual = -1.0 / (p - 1.0);
    double worst = 0.0;
    for (const Ball& ball : balls) {
        require(ball.radius >= 4.0 * h * (1.0 - 1e-12), "A_p: ball radius below 4h");
        const CellSet cells = cells_in_ball(weight.grid, ball);
        if (cells.empty()) continue;
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k : cells) {
            s1 += weight.values[k];
            s2 += std::pow(weight.values[k], dual);
        }
        const double count = static_cast<double>(cells.size());
        worst = std::max(worst, (s1 / count) * std::pow(s2 / count, p - 1.0));
    }
    return worst;
}

std::vector<AinfSample> sample_ainf(const Weight& weight, std::span<const Ball> balls, int subsets_per_ball,
                                    std::uint64_t seed) {
    require(subsets_per_ball >= 16, "A_inf: subsets_per_ball must be >= 16");
    require(!balls.empty(), "A_inf: ball family is empty");
    const Grid& grid = weight.grid;
    const double h = grid.spacing();
    Rng rng(seed);
    std::vector<AinfSample> out;
    std::vector<Ball> parts;
    for (const Ball& ball : balls) {
        const CellSet cells = cells_in_ball(grid, ball);
        if (cells.size() < 2) continue;
        const double w_ball = weighted_measure(weight, cells);
        for (int s = 0; s < subsets_per_ball; ++s) {
            parts.clear();
            const int pieces = 1 + static_cast<int>(rng.below(4));
            for (int q = 0; q < pieces; ++q) {
                const Point c = grid.node(cells[rng.below(cells.size())]);
                parts.push_back({c, rng.uniform(h, std::max(h, 0.5 * ball.radius))});
            }
            std::size_t count = 0;
            double w_sub = 0.0;
            for (std::size_t k : cells) {
                const Point x = grid.node(k);
                const bool inside = std::any_of(parts.begin(), parts.end(), [&](const Ball& b) {
                    return distance2(x, b.center) < b.radius * b.radius;
                });
                if (inside) {
                    ++count;
                    w_sub += weight.values[k] * h * h;
                }
            }
            out.push_back({static_cast<double>(count) / static_cast<double>(cells.size()), w_sub / w_ball});
        }
    }
    return out;
}

AinfPair fit_ainf(std::span<const AinfSample> samples) {
    // Envelope line: the supporting line of the upper hull of (log |K|/|B|, log w(K)/w(B))
    // at the mean abscissa.
    std::vector<Point> pts;
    for (const AinfSample& s : samples) {
        if (s.measure_ratio <= 0.0 || s.measure_ratio >= 1.0 || s.weight_ratio <= 0.0) continue;
        pts.push_back({std::log(s.measure_ratio), std::log(s.weight_ratio)});
    }
    require(pts.size() >= 2, "A_inf: degenerate fit (subsets are full-measure)");
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    double mean_x = 0.0;
    for (const Point& q : pts) mean_x += q.x;
    mean_x /= static_cast<double>(pts.size());
    require(pts.back().x > pts.front().x, "A_inf: degenerate fit (no spread in subset measure)");

    std::vector<Point> hull;
    for (const Point& q : pts) {
        while (!hull.empty() && hull.back().x == q.x) hull.pop_back();
        while (hull.size() >= 2) {
            const Point& o = hull[hull.size() - 2];
            const Point& m = hull.back();
            if ((m.x - o.x) * (q.y - o.y) - (m.y - o.y) * (q.x - o.x) < 0.0) break;
            hull.pop_back();
        }
        hull.push_back(q);
    }
    std::size_t e = 0;
    while (e + 2 < hull.size() && hull[e + 1].x < mean_x) ++e;
    const double slope = (hull[e + 1].y - hull[e].y) / (hull[e + 1].x - hull[e].x);
    const double nu = std::clamp(slope, 1e-3, 1.0);

    double c0 = 1.0;
    for (const AinfSample& s : samples) {
        if (s.measure_ratio <= 0.0) continue;
        c0 = std::max(c0, s.weight_ratio / std::pow(s.measure_ratio, nu));
    }
    return {c0, nu};
}

double ainf_envelope_coverage(const AinfPair& pair, std::span<const AinfSample> samples) {
    if (samples.empty()) return 1.0;
    std::size_t ok = 0;
    for (const AinfSample& s : samples)
        if (s.weight_ratio <= pair.c0 * std::pow(s.measure_ratio, pair.nu) * (1.0 + 1e-12)) ++ok;
    return static_cast<double>(ok) / static_cast<double>(samples.size());
}

AinfPair estimate_Ainf(Weight& weight, std::span<const Ball> balls, int subsets_per_ball, std::uint64_t seed) {
    const auto samples = sample_ainf(weight, balls, subsets_per_ball, seed);
    const AinfPair pair = fit_ainf(samples);
    weight.a_inf = pair;
    return pair;
}

CoefficientField make_coefficient(const Grid& grid, double p, const std::function<double(Point)>& a,
                                  const std::function<double(Point)>& b) {
    require(p > 1.0 && std::isfinite(p), "coefficient: p must lie in (1, inf)");
    CoefficientField c{grid, std::vector<double>(grid.node_count()), std::vector<double>(grid.node_count()), p, 1.0, 0};
    double a_max = 0.0, a_min = std::numeric_limits<double>::infinity(), b_max = 0.0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        const Point x = grid.node(k);
        c.a[k] = a(x);
        c.b[k] = b(x);
        require(c.a[k] > 0.0 && std::isfinite(c.a[k]), "coefficient: a must be positive and finite");
        require(std::isfinite(c.b[k]), "coefficient: b must be finite");
        a_max = std::max(a_max, c.a[k]);
        a_min = std::min(a_min, c.a[k]);
        b_max = std::max(b_max, std::abs(c.b[k]));
    }
    c.L = std::max({1.0, a_max, 1.0 / a_min, b_max});
    return c;
}

double column_average(const Grid& grid, std::span<const double> a, int column, int row_lo, int row_hi) {
    const double base = a[grid.index(column, row_lo)];
    double excess = 0.0;
    for (int j = row_lo; j <= row_hi; ++j) excess += a[grid.index(column, j)] - base;
    return base + excess / static_cast<double>(row_hi - row_lo + 1);
}

double partial_bmo_seminorm(const CoefficientField& coeff, double r0, int probe_directions) {
    const Grid& grid = coeff.grid;
    const double h = grid.spacing();
    require(r0 >= 4.0 * h * (1.0 - 1e-12), "partial BMO: r0 below resolution (r0 < 4h)");
    require(probe_directions >= 8, "partial BMO: need at least 8 probe directions");

    const int m = grid.nodes_per_side();
    const double p = coeff.p;
    std::vector<Point> probes(static_cast<std::size_t>(probe_directions));
    for (int k = 0; k < probe_directions; ++k) {
        const double t = 2.0 * std::numbers::pi * k / probe_directions;
        probes[k] = {std::cos(t), std::sin(t)};
    }
    // theta_1 at a point is sup over xi of |A(x,xi) - Abar(x1,xi)| / |xi|^{p-1}; for
    // this family the ratio is |a - abar| times a direction gain, taken over the probes.
    double gain = 0.0;
    for (const Point& e : probes) {
        const double norm = std::hypot(e.x, e.y);
        gain = std::max(gain, std::pow(norm, p - 2.0) * norm / std::pow(norm, p - 1.0));
    }
    const auto theta = [gain](double a, double abar) { return std::abs(a - abar) * gain; };

    double sup = 0.0;
    std::vector<double> abar(grid.node_count());
    for (double rho = r0; rho >= 2.0 * h * (1.0 - 1e-12); rho *= 0.5) {
        const double R = rho / h;
        const double R2 = R * R;
        const int reach = static_cast<int>(std::ceil(R)) - 1;
        // abar[(i, jc)]: slice average of column i over rows |j - jc| < R.
        for (int jc = 0; jc < m; ++jc)
            for (int i = 0; i < m; ++i)
                abar[grid.index(i, jc)] =
                    column_average(grid, coeff.a, i, std::max(0, jc - reach), std::min(m - 1, jc + reach));

        for (int jc = 0; jc < m; ++jc) {
            for (int ic = 0; ic < m; ++ic) {
                double total = 0.0;
                std::size_t count = 0;
                for (int j = std::max(0, jc - reach); j <= std::min(m - 1, jc + reach); ++j) {
                    const double dj = j - jc;
                    for (int i = std::max(0, ic - reach); i <= std::min(m - 1, ic + reach); ++i) {
                        const double di = i - ic;
                        if (di * di + dj * dj >= R2) continue;
                        total += theta(coeff.a[grid.index(i, j)], abar[grid.index(i, jc)]);
                        ++count;
                    }
                }
                if (count) sup = std::max(sup, total / static_cast<double>(count));
            }
        }
    }
    return sup;
}

} // namespace reglab
