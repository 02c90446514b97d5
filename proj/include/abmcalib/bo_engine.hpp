#pragma once

#include "abmcalib/acquisition.hpp"
#include "abmcalib/objective.hpp"
#include "abmcalib/param_space.hpp"
#include "abmcalib/pareto.hpp"
#include "abmcalib/surrogate_rf.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace abmcalib {

/// One black-box evaluation: the discrepancy breakdown plus, when the
/// binding produces full summaries, the robustness criteria.
struct EvaluationOutcome {
    CostBreakdown cost;
    std::optional<CriterionVector> criteria;
};

/// The evaluation boundary the engine drives. Implementations throw
/// SimulatorError (or TimeoutError) for failed runs; the engine records
/// the failure and continues.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual EvaluationOutcome evaluate(const ParameterVector& theta, std::uint64_t seed) = 0;
};

struct RunConfig {
    ParameterSpace space;
    std::size_t n_initial = 50;
    std::size_t max_iterations = 500;       // acquisitions after the initial design
    double max_wall_clock_seconds = 3600.0; // safety ceiling, checked between evaluations
    std::size_t retrain_period = 5;
    ForestHyperparams forest;
    AcquisitionOptions acquisition;
    std::uint64_t master_seed = 1;
    std::size_t n_runs = 5;
    std::size_t failure_cap = 10;

    void validate() const; // throws InputError listing the violated field
};

struct ArchiveRecord {
    std::size_t run_id = 0;
    std::size_t iteration = 0; // 1-based; 1..n_initial is the initial design
    ParameterVector theta;
    UnitVector unit_theta;
    CostBreakdown cost; // eps_global is +inf for failed evaluations
    std::optional<CriterionVector> criteria;
    std::uint64_t seed_used = 0;
    bool failed = false;
    std::string error;
    double eval_seconds = 0.0; // sidecar-log data only, never serialized

    double objective() const {
        return failed ? std::numeric_limits<double>::infinity() : cost.eps_global;
    }
};

struct RunState {
    std::size_t run_id = 0;
    std::vector<ArchiveRecord> archive;
    double incumbent_value = std::numeric_limits<double>::infinity();
    std::optional<UnitVector> incumbent_point;
    RandomForest forest; // state at the last retrain boundary
    std::size_t trained_boundary = 0;
    bool aborted = false;      // failure cap tripped
    std::string abort_reason;
    bool wall_clock_stop = false;

    const ArchiveRecord* best_record() const;
};

struct RunHooks {
    /// Called after every evaluation with the appended record.
    std::function<void(const ArchiveRecord&)> on_record;
    /// Cooperative stop; checked between evaluations.
    const std::atomic<bool>* interrupt = nullptr;
};

/// Executes one run: evaluates the Latin Hypercube design, fits the forest,
/// then alternates acquisition and evaluation, refitting every
/// retrain_period evaluations while the incumbent updates every iteration.
/// All randomness derives from (master_seed, run_id, purpose, iteration),
/// so a run resumed from preloaded records continues exactly as an
/// uninterrupted run would have.
RunState run_single(const RunConfig& config, Evaluator& evaluator, std::size_t run_id,
                    const RunHooks& hooks = {}, std::vector<ArchiveRecord> preloaded = {});

/// n_runs independent runs with disjoint derived seeds, executed
/// sequentially. run_hooks(run_id) supplies per-run persistence hooks.
std::vector<RunState> run_many(
    const RunConfig& config, Evaluator& evaluator,
    const std::function<RunHooks(std::size_t run_id)>& run_hooks = {});

/// Index of the run holding the lowest objective; runs must be non-empty.
std::size_t cross_run_best(const std::vector<RunState>& states);

/// Training boundary after `evaluations` records: the full initial design
/// plus whole retrain periods. The active forest is always fitted on the
/// records before this boundary.
std::size_t surrogate_training_boundary(const RunConfig& config, std::size_t evaluations);

/// Non-failed records in the archive prefix [0, boundary) as a surrogate
/// training set; failed evaluations are excluded.
TrainingSet surrogate_training_set(const std::vector<ArchiveRecord>& archive,
                                   std::size_t boundary);

// --- archive persistence (line-delimited JSON) ---

std::string archive_record_to_json(const ArchiveRecord& record);
ArchiveRecord archive_record_from_json(const std::string& line);
std::vector<ArchiveRecord> load_archive_jsonl(const std::string& path);

} // namespace abmcalib
