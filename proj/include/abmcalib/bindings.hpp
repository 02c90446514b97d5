#pragma once

#include "abmcalib/benchmark.hpp"
#include "abmcalib/bo_engine.hpp"
#include "abmcalib/external_simulator.hpp"
#include "abmcalib/toy_simulator.hpp"

#include <utility>

namespace abmcalib {

/// Scores the built-in microsimulator against target summaries. The
/// simulator seed is fixed per calibration (common random numbers), so the
/// objective is a deterministic function of theta and evaluating the
/// target-generating theta with the same seed scores exactly zero.
class ToyEvaluator : public Evaluator {
public:
    ToyEvaluator(ToyScenario scenario, ParameterSpace space, SimulationSummary targets,
                 std::uint64_t simulation_seed)
        : scenario_(std::move(scenario)),
          space_(std::move(space)),
          targets_(std::move(targets)),
          simulation_seed_(simulation_seed) {}

    EvaluationOutcome evaluate(const ParameterVector& theta, std::uint64_t) override;

    const ToyScenario& scenario() const { return scenario_; }
    const SimulationSummary& targets() const { return targets_; }

private:
    ToyScenario scenario_;
    ParameterSpace space_;
    SimulationSummary targets_;
    std::uint64_t simulation_seed_;
};

/// Scores an external child-process simulator against target summaries.
class ExternalEvaluator : public Evaluator {
public:
    ExternalEvaluator(ExternalSimulatorConfig config, ParameterSpace space,
                      SimulationSummary targets)
        : config_(std::move(config)), space_(std::move(space)), targets_(std::move(targets)) {}

    EvaluationOutcome evaluate(const ParameterVector& theta, std::uint64_t seed) override;

private:
    ExternalSimulatorConfig config_;
    ParameterSpace space_;
    SimulationSummary targets_;
};

/// Wraps an analytic benchmark function; the raw value stands in for the
/// discrepancy (mode and worker components pinned at their floor of 1).
class BenchmarkEvaluator : public Evaluator {
public:
    explicit BenchmarkEvaluator(BenchmarkProblem problem) : problem_(problem) {}

    EvaluationOutcome evaluate(const ParameterVector& theta, std::uint64_t) override;

private:
    BenchmarkProblem problem_;
};

} // namespace abmcalib
