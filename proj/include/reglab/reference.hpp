#pragma once

#include "reglab/field.hpp"
#include "reglab/geometry.hpp"

namespace reglab {

/// Direct sparse solve of the 5-point system (4u_i - sum of neighbours) = h^2 g_i
/// on the interior nodes of the domain, u = 0 elsewhere.
ScalarField poisson_direct(const Domain& domain, const ScalarField& g);

/// Relative discrete L2 difference ||a - b|| / ||b|| over all nodes.
double relative_l2(const ScalarField& a, const ScalarField& b);

} // namespace reglab
