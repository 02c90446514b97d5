#include "abmcalib/bo_engine.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/rng.hpp"
#include "abmcalib/text.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace abmcalib {

namespace {

using Json = nlohmann::ordered_json;

// Stream ids for seed derivation; every draw in a run is keyed by
// (master_seed, run_id, stream, index) and nothing else.
constexpr std::uint64_t kStreamLhs = 0x11;
constexpr std::uint64_t kStreamEvaluate = 0x22;
constexpr std::uint64_t kStreamAcquire = 0x33;
constexpr std::uint64_t kStreamForest = 0x44;

std::uint64_t run_seed(const RunConfig& config, std::size_t run_id, std::uint64_t stream,
                       std::uint64_t index = 0) {
    return derive_seed(config.master_seed, {run_id, stream, index});
}

} // namespace

std::size_t surrogate_training_boundary(const RunConfig& config, std::size_t evaluations) {
    if (evaluations < config.n_initial) return 0;
    const std::size_t extra = (evaluations - config.n_initial) / config.retrain_period;
    return config.n_initial + extra * config.retrain_period;
}

TrainingSet surrogate_training_set(const std::vector<ArchiveRecord>& archive,
                                   std::size_t boundary) {
    TrainingSet data;
    data.inputs.reserve(boundary);
    data.targets.reserve(boundary);
    for (std::size_t i = 0; i < boundary && i < archive.size(); ++i) {
        if (archive[i].failed) continue;
        data.inputs.push_back(archive[i].unit_theta);
        data.targets.push_back(archive[i].cost.eps_global);
    }
    return data;
}

void RunConfig::validate() const {
    if (space.dimension() == 0) throw InputError("run config: empty parameter space");
    if (n_initial < 2) throw InputError("run config: initial design needs at least 2 samples");
    if (retrain_period < 1) throw InputError("run config: retrain period must be at least 1");
    if (n_runs < 1) throw InputError("run config: at least one run required");
    if (forest.n_trees < 1) throw InputError("run config: forest needs at least one tree");
    if (acquisition.n_starts < 1) throw InputError("run config: acquisition needs a start point");
    if (max_wall_clock_seconds <= 0.0) throw InputError("run config: wall clock must be positive");
}

const ArchiveRecord* RunState::best_record() const {
    const ArchiveRecord* best = nullptr;
    for (const auto& record : archive) {
        if (record.failed) continue;
        if (best == nullptr || record.cost.eps_global < best->cost.eps_global) {
            best = &record;
        }
    }
    return best;
}

RunState run_single(const RunConfig& config, Evaluator& evaluator, std::size_t run_id,
                    const RunHooks& hooks, std::vector<ArchiveRecord> preloaded) {
    config.validate();

    RunState state;
    state.run_id = run_id;
    state.archive = std::move(preloaded);

    std::size_t failures = 0;
    for (const auto& record : state.archive) {
        if (record.failed) ++failures;
        if (!record.failed && record.cost.eps_global < state.incumbent_value) {
            state.incumbent_value = record.cost.eps_global;
            state.incumbent_point = record.unit_theta;
        }
    }

    const auto start_time = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_time;
        return elapsed.count() > config.max_wall_clock_seconds;
    };
    auto interrupted = [&] {
        return hooks.interrupt != nullptr && hooks.interrupt->load(std::memory_order_relaxed);
    };

    auto evaluate_point = [&](const UnitVector& unit) -> bool {
        const std::size_t iteration = state.archive.size() + 1;
        ArchiveRecord record;
        record.run_id = run_id;
        record.iteration = iteration;
        record.unit_theta = unit;
        record.theta = config.space.denormalize(unit);
        record.seed_used = run_seed(config, run_id, kStreamEvaluate, iteration);

        const auto t0 = std::chrono::steady_clock::now();
        try {
            const EvaluationOutcome outcome = evaluator.evaluate(record.theta, record.seed_used);
            record.cost = outcome.cost;
            record.criteria = outcome.criteria;
        } catch (const SimulatorError& e) {
            record.failed = true;
            record.error = e.what();
            record.cost.eps_global = std::numeric_limits<double>::infinity();
            ++failures;
        }
        record.eval_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (!record.failed && record.cost.eps_global < state.incumbent_value) {
            state.incumbent_value = record.cost.eps_global;
            state.incumbent_point = record.unit_theta;
        }
        state.archive.push_back(std::move(record));
        if (hooks.on_record) hooks.on_record(state.archive.back());

        if (failures > config.failure_cap) {
            state.aborted = true;
            state.abort_reason = "simulator failure cap exceeded (" + std::to_string(failures) +
                                 " failures > cap " + std::to_string(config.failure_cap) + ")";
            return false;
        }
        return true;
    };

    auto refresh_forest = [&] {
        const std::size_t boundary = surrogate_training_boundary(config, state.archive.size());
        if (boundary == 0 || boundary == state.trained_boundary) return;
        const TrainingSet data = surrogate_training_set(state.archive, boundary);
        if (data.size() == 0) {
            // Every record so far failed; keep sampling at random below.
            state.trained_boundary = boundary;
            state.forest = RandomForest();
            return;
        }
        state.forest = RandomForest::fit(data, config.forest,
                                         run_seed(config, run_id, kStreamForest, boundary));
        state.trained_boundary = boundary;
    };

    // Initial design. On resume the design points are regenerated from the
    // run's LHS seed and the already-evaluated prefix is skipped.
    const auto design = config.space.lhs_sample(config.n_initial,
                                                run_seed(config, run_id, kStreamLhs));
    while (state.archive.size() < config.n_initial) {
        if (interrupted() || out_of_time()) {
            state.wall_clock_stop = !interrupted();
            return state;
        }
        if (!evaluate_point(design[state.archive.size()])) {
            return state;
        }
    }

    const std::size_t total_budget = config.n_initial + config.max_iterations;
    std::vector<UnitVector> evaluated;
    while (state.archive.size() < total_budget) {
        if (interrupted() || out_of_time()) {
            state.wall_clock_stop = !interrupted();
            return state;
        }
        refresh_forest();

        const std::size_t iteration = state.archive.size() + 1;
        const std::uint64_t acq_seed = run_seed(config, run_id, kStreamAcquire, iteration);
        UnitVector next;
        if (state.forest.trained()) {
            evaluated.clear();
            evaluated.reserve(state.archive.size());
            for (const auto& record : state.archive) {
                evaluated.push_back(record.unit_theta);
            }
            AcquisitionContext ctx;
            ctx.forest = &state.forest;
            ctx.incumbent_value = state.incumbent_value;
            ctx.incumbent_point = state.incumbent_point;
            ctx.evaluated_points = &evaluated;
            next = optimize_acquisition(ctx, config.acquisition, acq_seed).point;
        } else {
            Rng rng(acq_seed);
            next.values.resize(config.space.dimension());
            for (auto& v : next.values) v = rng.uniform();
        }
        if (!evaluate_point(next)) {
            return state;
        }
    }
    return state;
}

std::vector<RunState> run_many(const RunConfig& config, Evaluator& evaluator,
                               const std::function<RunHooks(std::size_t)>& run_hooks) {
    config.validate();
    std::vector<RunState> states;
    states.reserve(config.n_runs);
    for (std::size_t run_id = 1; run_id <= config.n_runs; ++run_id) {
        const RunHooks hooks = run_hooks ? run_hooks(run_id) : RunHooks{};
        states.push_back(run_single(config, evaluator, run_id, hooks));
        if (hooks.interrupt != nullptr && hooks.interrupt->load(std::memory_order_relaxed)) {
            break;
        }
    }
    return states;
}

std::size_t cross_run_best(const std::vector<RunState>& states) {
    if (states.empty()) {
        throw InputError("cross_run_best: no runs");
    }
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].incumbent_value < best_value) {
            best_value = states[i].incumbent_value;
            best = i;
        }
    }
    return best;
}

std::string archive_record_to_json(const ArchiveRecord& record) {
    Json j;
    j["run"] = record.run_id;
    j["iter"] = record.iteration;
    j["theta"] = record.theta.values;
    j["unit"] = record.unit_theta.values;
    j["failed"] = record.failed;
    if (record.failed) {
        j["cost"] = nullptr;
        j["error"] = record.error;
    } else {
        j["cost"] = Json{{"eps_od", record.cost.eps_od},
                         {"eps_mode", record.cost.eps_mode},
                         {"eps_workers", record.cost.eps_workers},
                         {"eps_global", record.cost.eps_global}};
    }
    if (record.criteria) {
        j["criteria"] = *record.criteria;
    } else {
        j["criteria"] = nullptr;
    }
    j["seed"] = std::to_string(record.seed_used); // decimal string: json numbers lose 64-bit ints
    return j.dump();
}

ArchiveRecord archive_record_from_json(const std::string& line) {
    const Json j = Json::parse(line);
    ArchiveRecord record;
    record.run_id = j.at("run").get<std::size_t>();
    record.iteration = j.at("iter").get<std::size_t>();
    record.theta.values = j.at("theta").get<std::vector<double>>();
    record.unit_theta.values = j.at("unit").get<std::vector<double>>();
    record.failed = j.at("failed").get<bool>();
    if (record.failed) {
        record.cost.eps_global = std::numeric_limits<double>::infinity();
        if (j.contains("error") && j.at("error").is_string()) {
            record.error = j.at("error").get<std::string>();
        }
    } else {
        const Json& cost = j.at("cost");
        record.cost.eps_od = cost.at("eps_od").get<double>();
        record.cost.eps_mode = cost.at("eps_mode").get<double>();
        record.cost.eps_workers = cost.at("eps_workers").get<double>();
        record.cost.eps_global = cost.at("eps_global").get<double>();
    }
    if (j.contains("criteria") && j.at("criteria").is_array()) {
        CriterionVector criteria{};
        const auto values = j.at("criteria").get<std::vector<double>>();
        if (values.size() != criteria.size()) {
            throw InputError("archive record: criteria vector must have 6 entries");
        }
        std::copy(values.begin(), values.end(), criteria.begin());
        record.criteria = criteria;
    }
    record.seed_used = std::stoull(j.at("seed").get<std::string>());
    return record;
}

std::vector<ArchiveRecord> load_archive_jsonl(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<ArchiveRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            records.push_back(archive_record_from_json(line));
        } catch (const std::exception& e) {
            throw ParseError(path, line_no, e.what());
        }
    }
    return records;
}

} // namespace abmcalib
