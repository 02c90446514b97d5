#pragma once

#include "abmcalib/summary.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

namespace abmcalib {

/// Six robustness criteria per simulation, all oriented smaller-is-better:
/// 0 max absolute mode-share error
/// 1 work-trip spatial error        (RMSE over districts of anchor arrivals)
/// 2 education-trip spatial error   (same form)
/// 3 absolute worker-count error
/// 4 absolute total-legs error      (from the OD matrices)
/// 5 spatial legs error             (RMSE over districts of OD origin totals)
using CriterionVector = std::array<double, 6>;

inline constexpr std::array<const char*, 6> kCriterionNames{
    "crit_mode_share",  "crit_work_spatial", "crit_edu_spatial",
    "crit_worker_count", "crit_total_legs",   "crit_spatial_legs"};

/// Per-criterion feasibility cutoffs; a record is feasible when every
/// criterion is strictly below its threshold. Only the mode-share cutoff
/// has a published default; the rest default to +infinity (dominance only).
struct ParetoConfig {
    CriterionVector thresholds{0.10,
                               std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity()};
};

/// Requires aux_counts on both summaries (the spatial work/education
/// criteria come from them); throws InputError when absent.
CriterionVector compute_criteria(const SimulationSummary& sim, const SimulationSummary& targets);

/// True iff a is no worse in every criterion and strictly better in one.
bool dominates(const CriterionVector& a, const CriterionVector& b);

struct ParetoEntry {
    std::size_t run_id = 0;
    std::size_t iteration = 0;
    double eps_global = 0.0;
    CriterionVector criteria{};
};

struct ParetoFront {
    std::vector<ParetoEntry> entries; // ordered by eps_global ascending
    bool empty_feasible_set = false;  // warning: thresholds excluded everything
};

/// Filters infeasible entries, then keeps the nondominated subset
/// (identical criterion vectors are all retained).
ParetoFront pareto_front(const std::vector<ParetoEntry>& records, const ParetoConfig& config);

} // namespace abmcalib
