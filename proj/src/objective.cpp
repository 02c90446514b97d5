#include "abmcalib/objective.hpp"

#include "abmcalib/errors.hpp"

#include <cmath>

namespace abmcalib {

namespace {

void validate_shares(const ModeShares& m, const char* label) {
    double sum = 0.0;
    for (double s : m.shares) {
        if (s < 0.0 || s > 1.0) {
            throw InputError(std::string(label) + " mode share outside [0,1]");
        }
        sum += s;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InputError(std::string(label) + " mode shares do not sum to 1");
    }
}

} // namespace

double epsilon_od(const ODMatrix& sim, const ODMatrix& observed) {
    if (sim.n() != observed.n()) {
        throw InputError("epsilon_od: district counts differ (" + std::to_string(sim.n()) +
                         " vs " + std::to_string(observed.n()) + ")");
    }
    if (sim.n() == 0) {
        throw InputError("epsilon_od: empty OD matrices");
    }
    double ssq = 0.0;
    for (std::size_t k = 0; k < sim.counts.size(); ++k) {
        const double diff = observed.counts[k] - sim.counts[k];
        ssq += diff * diff;
    }
    return 0.01 * std::sqrt(ssq / static_cast<double>(sim.n()));
}

double epsilon_mode(const ModeShares& sim, const ModeShares& observed) {
    validate_shares(sim, "simulated");
    validate_shares(observed, "observed");
    double ssq = 0.0;
    for (std::size_t i = 0; i < kModeCount; ++i) {
        const double diff = observed.shares[i] - sim.shares[i];
        ssq += diff * diff;
    }
    return 1.0 + std::sqrt(ssq);
}

double epsilon_workers(const WorkerCoverage& w) {
    if (w.total <= 0) {
        throw InputError("epsilon_workers: total employed must be positive");
    }
    if (w.assigned < 0 || w.assigned > w.total) {
        throw InputError("epsilon_workers: assigned outside [0, total]");
    }
    return 2.0 - static_cast<double>(w.assigned) / static_cast<double>(w.total);
}

CostBreakdown epsilon_global(const SimulationSummary& sim, const SimulationSummary& targets) {
    CostBreakdown cost;
    cost.eps_od = epsilon_od(sim.od, targets.od);
    cost.eps_mode = epsilon_mode(sim.modes, targets.modes);
    cost.eps_workers = epsilon_workers(sim.workers);
    cost.eps_global = cost.eps_od * cost.eps_mode * cost.eps_workers;
    return cost;
}

} // namespace abmcalib
