#include "reglab/reference.hpp"

#include "reglab/common.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <vector>

namespace reglab {

ScalarField poisson_direct(const Domain& domain, const ScalarField& g) {
    const Grid& grid = domain.grid;
    const double h2 = grid.spacing() * grid.spacing();
    std::vector<int> unknown(grid.node_count(), -1);
    int n = 0;
    for (std::size_t k = 0; k < grid.node_count(); ++k)
        if (domain.is_interior(k)) unknown[k] = n++;
    require(n > 0, "poisson: domain has no interior nodes");

    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd rhs(n);
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        const int r = unknown[k];
        if (r < 0) continue;
        rhs[r] = h2 * g[k];
        entries.emplace_back(r, r, 4.0);
        const int i = grid.column(k), j = grid.row(k);
        const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        for (const auto& q : nb) {
            const int c = unknown[grid.index(q[0], q[1])];
            if (c >= 0) entries.emplace_back(r, c, -1.0);
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    require(solver.info() == Eigen::Success, "poisson: factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);

    ScalarField u(grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k)
        if (unknown[k] >= 0) u[k] = x[unknown[k]];
    return u;
}

double relative_l2(const ScalarField& a, const ScalarField& b) {
    require(a.size() == b.size(), "relative_l2: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        den += b[k] * b[k];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace reglab
