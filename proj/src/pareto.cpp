#include "abmcalib/pareto.hpp"

#include "abmcalib/errors.hpp"

#include <algorithm>
#include <cmath>

namespace abmcalib {

namespace {

double spatial_rmse(const SimulationSummary& sim, const SimulationSummary& targets,
                    const std::string& key_prefix, std::size_t n) {
    double ssq = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const std::string key = key_prefix + std::to_string(d);
        const double diff = sim.aux(key) - targets.aux(key);
        ssq += diff * diff;
    }
    return std::sqrt(ssq / static_cast<double>(n));
}

} // namespace

CriterionVector compute_criteria(const SimulationSummary& sim, const SimulationSummary& targets) {
    if (sim.aux_counts.empty() || targets.aux_counts.empty()) {
        throw InputError("compute_criteria: aux counts missing on " +
                         std::string(sim.aux_counts.empty() ? "simulated" : "target") +
                         " summary");
    }
    if (sim.od.n() != targets.od.n() || sim.od.n() == 0) {
        throw InputError("compute_criteria: incompatible OD matrices");
    }
    const std::size_t n = sim.od.n();

    CriterionVector c{};
    for (std::size_t m = 0; m < kModeCount; ++m) {
        c[0] = std::max(c[0], std::abs(sim.modes.shares[m] - targets.modes.shares[m]));
    }
    c[1] = spatial_rmse(sim, targets, "work_dest_district_", n);
    c[2] = spatial_rmse(sim, targets, "edu_dest_district_", n);
    c[3] = std::abs(static_cast<double>(sim.workers.assigned) -
                    static_cast<double>(targets.workers.assigned));
    c[4] = std::abs(sim.od.total() - targets.od.total());
    double ssq = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const double diff = sim.od.row_sum(d) - targets.od.row_sum(d);
        ssq += diff * diff;
    }
    c[5] = std::sqrt(ssq / static_cast<double>(n));
    return c;
}

bool dominates(const CriterionVector& a, const CriterionVector& b) {
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

ParetoFront pareto_front(const std::vector<ParetoEntry>& records, const ParetoConfig& config) {
    for (double t : config.thresholds) {
        if (!(t > 0.0)) {
            throw InputError("pareto: thresholds must be positive");
        }
    }

    std::vector<const ParetoEntry*> feasible;
    feasible.reserve(records.size());
    for (const auto& record : records) {
        bool ok = true;
        for (std::size_t i = 0; i < record.criteria.size(); ++i) {
            if (!(record.criteria[i] < config.thresholds[i])) {
                ok = false;
                break;
            }
        }
        if (ok) feasible.push_back(&record);
    }

    ParetoFront front;
    if (feasible.empty()) {
        front.empty_feasible_set = !records.empty();
        return front;
    }

    for (const ParetoEntry* candidate : feasible) {
        bool dominated = false;
        for (const ParetoEntry* other : feasible) {
            if (other != candidate && dominates(other->criteria, candidate->criteria)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.entries.push_back(*candidate);
    }
    std::sort(front.entries.begin(), front.entries.end(),
              [](const ParetoEntry& a, const ParetoEntry& b) {
                  if (a.eps_global != b.eps_global) return a.eps_global < b.eps_global;
                  if (a.run_id != b.run_id) return a.run_id < b.run_id;
                  return a.iteration < b.iteration;
              });
    return front;
}

} // namespace abmcalib
