#pragma once

namespace reglab {

/// Entry point of the reglab executable. Returns 0 on success or PASS,
/// 2 on a FAIL verdict or solver non-convergence, 1 on usage/config errors.
int dispatch(int argc, char** argv);

} // namespace reglab
