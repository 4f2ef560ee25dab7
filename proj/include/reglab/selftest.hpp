#pragma once

#include "reglab/report.hpp"

namespace reglab {

struct SelftestResult {
    Table table; ///< check, module, detail, verdict
    bool pass = true;
};

/// Closed-form and degenerate cases of every module; runs in a few seconds.
SelftestResult run_selftest();

} // namespace reglab
