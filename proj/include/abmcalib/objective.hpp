#pragma once

#include "abmcalib/summary.hpp"

namespace abmcalib {

/// The three discrepancy components and their product. The OD term has
/// floor 0 while the mode and worker terms have floor 1, so the product
/// vanishes exactly when the OD matrices agree.
struct CostBreakdown {
    double eps_od = 0.0;
    double eps_mode = 1.0;
    double eps_workers = 1.0;
    double eps_global = 0.0;
};

/// (1/100) * sqrt((1/n) * sum of squared OD differences), n = districts.
double epsilon_od(const ODMatrix& sim, const ODMatrix& observed);

/// 1 + Euclidean distance between the two share vectors.
double epsilon_mode(const ModeShares& sim, const ModeShares& observed);

/// 2 - assigned/total; 1 at full worker coverage, 2 at none.
double epsilon_workers(const WorkerCoverage& w);

CostBreakdown epsilon_global(const SimulationSummary& sim, const SimulationSummary& targets);

} // namespace abmcalib
