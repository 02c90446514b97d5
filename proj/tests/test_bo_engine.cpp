#include "abmcalib/bo_engine.hpp"

#include "abmcalib/bindings.hpp"
#include "abmcalib/errors.hpp"
#include "abmcalib/text.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace abmcalib;

namespace {

RunConfig quick_sphere_config(std::size_t d = 3) {
    RunConfig config;
    config.space = BenchmarkProblem::make("sphere", d, -2.0, 2.0).space();
    config.n_initial = 10;
    config.max_iterations = 15;
    config.retrain_period = 5;
    config.forest.n_trees = 60;
    config.forest.n_threads = 1;
    config.acquisition.n_starts = 4;
    config.master_seed = 123;
    config.n_runs = 2;
    return config;
}

class CountingEvaluator : public Evaluator {
public:
    explicit CountingEvaluator(BenchmarkProblem problem) : inner_(problem) {}
    EvaluationOutcome evaluate(const ParameterVector& theta, std::uint64_t seed) override {
        ++calls;
        return inner_.evaluate(theta, seed);
    }
    int calls = 0;

private:
    BenchmarkEvaluator inner_;
};

/// Fails on a fixed set of call indices (1-based).
class FlakyEvaluator : public Evaluator {
public:
    FlakyEvaluator(BenchmarkProblem problem, std::set<int> failing_calls)
        : inner_(problem), failing_(std::move(failing_calls)) {}
    EvaluationOutcome evaluate(const ParameterVector& theta, std::uint64_t seed) override {
        ++calls;
        if (failing_.count(calls)) {
            throw SimulatorError("synthetic failure on call " + std::to_string(calls));
        }
        return inner_.evaluate(theta, seed);
    }
    int calls = 0;

private:
    BenchmarkEvaluator inner_;
    std::set<int> failing_;
};

std::vector<std::string> archive_as_json(const RunState& state) {
    std::vector<std::string> lines;
    lines.reserve(state.archive.size());
    for (const auto& record : state.archive) {
        lines.push_back(archive_record_to_json(record));
    }
    return lines;
}

} // namespace

TEST_CASE("a zero-iteration budget stops after the initial design") {
    RunConfig config = quick_sphere_config();
    config.max_iterations = 0;
    BenchmarkEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState state = run_single(config, evaluator, 1);
    CHECK(state.archive.size() == config.n_initial);
    for (std::size_t i = 0; i < state.archive.size(); ++i) {
        CHECK(state.archive[i].iteration == i + 1);
    }
}

TEST_CASE("the incumbent trace is non-increasing and matches archive minima") {
    const RunConfig config = quick_sphere_config();
    BenchmarkEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState state = run_single(config, evaluator, 2);

    double best = std::numeric_limits<double>::infinity();
    for (const auto& record : state.archive) {
        best = std::min(best, record.objective());
    }
    CHECK(state.incumbent_value == best);
    CHECK(state.best_record() != nullptr);
    CHECK(state.best_record()->cost.eps_global == best);
}

TEST_CASE("no two archive records share a unit point") {
    const RunConfig config = quick_sphere_config();
    BenchmarkEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState state = run_single(config, evaluator, 3);
    for (std::size_t i = 0; i < state.archive.size(); ++i) {
        for (std::size_t j = i + 1; j < state.archive.size(); ++j) {
            double linf = 0.0;
            for (std::size_t k = 0; k < state.archive[i].unit_theta.size(); ++k) {
                linf = std::max(linf, std::abs(state.archive[i].unit_theta[k] -
                                               state.archive[j].unit_theta[k]));
            }
            CHECK(linf > 1e-9);
        }
    }
}

TEST_CASE("failures are flagged, excluded from training, and capped") {
    RunConfig config = quick_sphere_config();
    config.n_initial = 20;
    config.max_iterations = 30;

    SUBCASE("a few failures leave a completed run") {
        FlakyEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0), {4, 11, 27});
        const RunState state = run_single(config, evaluator, 1);
        CHECK(!state.aborted);
        CHECK(state.archive.size() == 50);
        int failed = 0;
        for (const auto& record : state.archive) {
            if (record.failed) {
                ++failed;
                CHECK(record.objective() == std::numeric_limits<double>::infinity());
                CHECK(!record.error.empty());
            }
        }
        CHECK(failed == 3);

        const std::size_t boundary = surrogate_training_boundary(config, state.archive.size());
        CHECK(boundary == 50);
        const TrainingSet training = surrogate_training_set(state.archive, boundary);
        CHECK(training.size() == 47);
    }

    SUBCASE("exceeding the cap aborts with diagnostics") {
        std::set<int> failing;
        for (int i = 1; i <= 12; ++i) failing.insert(i);
        config.failure_cap = 5;
        FlakyEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0), failing);
        const RunState state = run_single(config, evaluator, 1);
        CHECK(state.aborted);
        CHECK(state.archive.size() == 6); // cap + 1 failures, then stop
        CHECK(state.abort_reason.find("failure cap") != std::string::npos);
    }
}

TEST_CASE("runs are deterministic and their designs are disjoint") {
    const RunConfig config = quick_sphere_config();
    BenchmarkEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const auto states_a = run_many(config, evaluator);
    const auto states_b = run_many(config, evaluator);
    REQUIRE(states_a.size() == 2);
    REQUIRE(states_b.size() == 2);
    for (std::size_t r = 0; r < states_a.size(); ++r) {
        CHECK(archive_as_json(states_a[r]) == archive_as_json(states_b[r]));
    }

    // Distinct run seeds produce distinct initial designs.
    bool designs_differ = false;
    for (std::size_t i = 0; i < config.n_initial; ++i) {
        if (states_a[0].archive[i].unit_theta.values != states_a[1].archive[i].unit_theta.values) {
            designs_differ = true;
        }
    }
    CHECK(designs_differ);

    const std::size_t best = cross_run_best(states_a);
    CHECK(states_a[best].incumbent_value ==
          std::min(states_a[0].incumbent_value, states_a[1].incumbent_value));
}

TEST_CASE("optimization beats random search on a small sphere") {
    RunConfig config = quick_sphere_config(4);
    config.n_initial = 12;
    config.max_iterations = 28;
    config.n_runs = 1;

    int bo_wins = 0;
    for (std::uint64_t seed : {101u, 202u, 303u}) {
        config.master_seed = seed;
        BenchmarkEvaluator evaluator(BenchmarkProblem::make("sphere", 4, -2.0, 2.0));
        const RunState state = run_single(config, evaluator, 1);
        BenchmarkEvaluator baseline_eval(BenchmarkProblem::make("sphere", 4, -2.0, 2.0));
        const double baseline = testing::random_search_best(
            config.space, baseline_eval, config.n_initial + config.max_iterations, seed);
        if (state.incumbent_value < baseline) ++bo_wins;
    }
    CHECK(bo_wins >= 2); // median winner over the three seeds
}

TEST_CASE("resume reproduces the uninterrupted run exactly") {
    RunConfig config = quick_sphere_config();
    config.max_iterations = 20;
    BenchmarkEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState straight = run_single(config, evaluator, 4);

    // Stop after 18 evaluations, then continue from the saved records.
    RunConfig truncated = config;
    truncated.max_iterations = 8;
    BenchmarkEvaluator evaluator2(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState partial = run_single(truncated, evaluator2, 4);
    CHECK(partial.archive.size() == 18);

    BenchmarkEvaluator evaluator3(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState resumed = run_single(config, evaluator3, 4, {}, partial.archive);
    CHECK(archive_as_json(resumed) == archive_as_json(straight));
}

TEST_CASE("archive records survive the JSONL round trip") {
    const RunConfig config = quick_sphere_config();
    BenchmarkEvaluator evaluator(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState state = run_single(config, evaluator, 7);

    testing::TempDir dir("jsonl");
    std::string content;
    for (const auto& record : state.archive) {
        content += archive_record_to_json(record);
        content += '\n';
    }
    write_text_file(dir.file("archive.jsonl"), content);
    const auto loaded = load_archive_jsonl(dir.file("archive.jsonl"));
    REQUIRE(loaded.size() == state.archive.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(archive_record_to_json(loaded[i]) == archive_record_to_json(state.archive[i]));
    }
}

TEST_CASE("config validation lists broken fields") {
    RunConfig config = quick_sphere_config();
    config.n_initial = 1;
    CHECK_THROWS_AS(config.validate(), InputError);
    config = quick_sphere_config();
    config.retrain_period = 0;
    CHECK_THROWS_AS(config.validate(), InputError);
    config = quick_sphere_config();
    config.n_runs = 0;
    CHECK_THROWS_AS(config.validate(), InputError);
}

TEST_CASE("evaluation seeds are stable stream derivations") {
    // Two runs with the same master seed assign the same per-iteration seeds;
    // the counting evaluator sees identical call sequences.
    const RunConfig config = quick_sphere_config();
    CountingEvaluator a(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    CountingEvaluator b(BenchmarkProblem::make("sphere", 3, -2.0, 2.0));
    const RunState sa = run_single(config, a, 1);
    const RunState sb = run_single(config, b, 1);
    CHECK(a.calls == b.calls);
    for (std::size_t i = 0; i < sa.archive.size(); ++i) {
        CHECK(sa.archive[i].seed_used == sb.archive[i].seed_used);
    }
}
