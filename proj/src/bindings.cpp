#include "abmcalib/bindings.hpp"

#include "abmcalib/errors.hpp"

namespace abmcalib {

namespace {

std::optional<CriterionVector> try_criteria(const SimulationSummary& sim,
                                            const SimulationSummary& targets) {
    if (sim.aux_counts.empty() || targets.aux_counts.empty()) {
        return std::nullopt; // criteria need schedule-derived totals
    }
    return compute_criteria(sim, targets);
}

} // namespace

EvaluationOutcome ToyEvaluator::evaluate(const ParameterVector& theta, std::uint64_t) {
    const SimulationSummary sim = toy_simulate(scenario_, space_, theta, simulation_seed_);
    EvaluationOutcome outcome;
    outcome.cost = epsilon_global(sim, targets_);
    outcome.criteria = try_criteria(sim, targets_);
    return outcome;
}

EvaluationOutcome ExternalEvaluator::evaluate(const ParameterVector& theta, std::uint64_t seed) {
    const SimulationSummary sim = external_evaluate(config_, space_, theta, seed);
    EvaluationOutcome outcome;
    outcome.cost = epsilon_global(sim, targets_);
    outcome.criteria = try_criteria(sim, targets_);
    return outcome;
}

EvaluationOutcome BenchmarkEvaluator::evaluate(const ParameterVector& theta, std::uint64_t) {
    EvaluationOutcome outcome;
    const double value = benchmark_cost(problem_, theta);
    outcome.cost.eps_od = value;
    outcome.cost.eps_mode = 1.0;
    outcome.cost.eps_workers = 1.0;
    outcome.cost.eps_global = value;
    return outcome;
}

} // namespace abmcalib
