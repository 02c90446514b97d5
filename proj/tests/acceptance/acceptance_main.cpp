// Acceptance suite: one self-contained check per release criterion, each
// printed as a single PASS/FAIL line. The process exits nonzero if any
// criterion fails.

#include "abmcalib/acquisition.hpp"
#include "abmcalib/bindings.hpp"
#include "abmcalib/bo_engine.hpp"
#include "abmcalib/cli.hpp"
#include "abmcalib/config.hpp"
#include "abmcalib/errors.hpp"
#include "abmcalib/objective.hpp"
#include "abmcalib/pareto.hpp"
#include "abmcalib/rng.hpp"
#include "abmcalib/summary_io.hpp"
#include "abmcalib/text.hpp"
#include "abmcalib/toy_simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/stat.h>
#include <unistd.h>

using namespace abmcalib;
namespace fs = std::filesystem;

namespace {

#ifndef ABM_CALIB_BIN
#define ABM_CALIB_BIN "abm-calib"
#endif

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            detail = message;
        }
    }
    void note(const std::string& message) {
        if (detail.empty()) detail = message;
    }
};

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double monte_carlo_ei(double mean, double std, double f_best, std::size_t n_samples,
                      std::uint64_t seed) {
    Rng rng(seed);
    double sum = 0.0;
    const std::size_t pairs = n_samples / 2;
    for (std::size_t i = 0; i < pairs; ++i) {
        const double z = rng.normal();
        sum += std::max(f_best - (mean + std * z), 0.0);
        sum += std::max(f_best - (mean - std * z), 0.0);
    }
    return sum / static_cast<double>(2 * pairs);
}

// ---------------------------------------------------------------------------

Check criterion_1_ei_oracle() {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::uint64_t seed = 1;
    for (const double mean : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        for (const double sigma : {0.1, 0.5, 1.0, 2.0}) {
            const double oracle = monte_carlo_ei(mean, sigma, 0.0, 1000000, seed++);
            const double analytic = expected_improvement(mean, sigma, 0.0);
            worst = std::max(worst, std::abs(analytic - oracle));
        }
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check.require(worst <= 3e-3, "max |EI - MC| = " + fmt_double(worst) + " above 3e-3");
    check.require(elapsed < 10.0, "runtime " + fmt_double(elapsed) + " s exceeds 10 s");
    check.note("max |EI - MC| = " + fmt_double(worst) + ", " + fmt_double(elapsed) + " s");
    return check;
}

Check criterion_2_surrogate_aggregation() {
    Check check;
    Rng rng(7);
    TrainingSet data;
    for (int i = 0; i < 60; ++i) {
        UnitVector x;
        double y = 0.0;
        for (int j = 0; j < 4; ++j) {
            x.values.push_back(rng.uniform());
            y += std::sin(3.0 * x.values.back());
        }
        data.inputs.push_back(std::move(x));
        data.targets.push_back(y + 0.05 * rng.normal());
    }
    ForestHyperparams hp;
    hp.n_trees = 48;
    hp.n_threads = 1;
    const RandomForest forest = RandomForest::fit(data, hp, 99);

    double worst = 0.0;
    for (int q = 0; q < 100; ++q) {
        UnitVector x;
        for (int j = 0; j < 4; ++j) x.values.push_back(rng.uniform());
        const SurrogatePrediction p = forest.predict(x);
        const auto taus = forest.tree_predictions(x);
        double mean = 0.0;
        for (double t : taus) mean += t;
        mean /= static_cast<double>(taus.size());
        double var = 0.0;
        for (double t : taus) var += (mean - t) * (mean - t);
        const double sd = std::sqrt(var / static_cast<double>(taus.size()));
        worst = std::max({worst, std::abs(p.mean - mean), std::abs(p.std - sd)});
    }
    check.require(worst <= 1e-12, "aggregation mismatch " + fmt_double(worst));

    hp.n_trees = 1;
    const RandomForest single = RandomForest::fit(data, hp, 5);
    TrainingSet constant = data;
    std::fill(constant.targets.begin(), constant.targets.end(), 2.5);
    hp.n_trees = 24;
    const RandomForest degenerate = RandomForest::fit(constant, hp, 5);
    for (int q = 0; q < 25; ++q) {
        UnitVector x;
        for (int j = 0; j < 4; ++j) x.values.push_back(rng.uniform());
        check.require(single.predict(x).std == 0.0, "C=1 spread not exactly zero");
        check.require(degenerate.predict(x).std == 0.0, "constant-fit spread not exactly zero");
        check.require(degenerate.predict(x).mean == 2.5, "constant-fit mean drifted");
    }
    check.note("max aggregation error " + fmt_double(worst));
    return check;
}

Check criterion_3_lhs_property() {
    Check check;
    const auto verify = [&](std::size_t n, std::size_t d, std::uint64_t seed) {
        const auto space = ParameterSpace::uniform_box(d, 0.0, 1.0);
        const auto points = space.lhs_sample(n, seed);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<int> bins(n, 0);
            for (const auto& p : points) {
                if (p[j] < 0.0 || p[j] >= 1.0) {
                    check.require(false, "sample outside [0,1) in dim " + std::to_string(j));
                    return;
                }
                bins[static_cast<std::size_t>(p[j] * static_cast<double>(n))]++;
            }
            for (int b : bins) {
                if (b != 1) {
                    check.require(false, "stratum multiplicity " + std::to_string(b) + " at (" +
                                             std::to_string(n) + "," + std::to_string(d) + ")");
                    return;
                }
            }
        }
    };
    verify(10, 3, 41);
    verify(50, 477, 42);
    check.note("(10,3) and (50,477) each hit every stratum once");
    return check;
}

Check criterion_4_objective_fidelity() {
    Check check;
    const ModeShares sim{{0.366, 0.420, 0.200, 0.014}};
    const ModeShares baseline = ModeShares::from_counts({0.256, 0.488, 0.239, 0.012});
    const double mode_eps = epsilon_mode(sim, baseline);
    check.require(std::abs(mode_eps - 1.1356) <= 1e-3,
                  "eps_mode = " + fmt_double(mode_eps) + " not within 1e-3 of 1.1356");

    check.require(epsilon_workers({750, 1000}) == 1.25, "eps_workers(750/1000) != 1.25");

    SimulationSummary summary;
    summary.od = ODMatrix({0, 1});
    summary.od.at(0, 0) = 120.0;
    summary.od.at(0, 1) = 30.0;
    summary.od.at(1, 0) = 25.0;
    summary.od.at(1, 1) = 80.0;
    summary.modes = ModeShares{{0.3, 0.4, 0.2, 0.1}};
    summary.workers = {900, 1000};
    const CostBreakdown cost = epsilon_global(summary, summary);
    check.require(cost.eps_global == 0.0, "identical summaries scored nonzero");
    check.note("eps_mode = " + fmt_double(mode_eps));
    return check;
}

Check criterion_5_pareto_oracle() {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2718);
    std::vector<ParetoEntry> entries(1000);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].run_id = 1;
        entries[i].iteration = i + 1;
        entries[i].eps_global = rng.uniform();
        for (auto& c : entries[i].criteria) c = rng.uniform();
    }
    ParetoConfig config;
    config.thresholds.fill(std::numeric_limits<double>::infinity());
    const ParetoFront front = pareto_front(entries, config);

    std::set<std::size_t> got;
    for (const auto& e : front.entries) got.insert(e.iteration);
    std::set<std::size_t> expected;
    for (const auto& a : entries) {
        bool dominated = false;
        for (const auto& b : entries) {
            if (&a == &b) continue;
            bool all_le = true, one_lt = false;
            for (std::size_t k = 0; k < 6; ++k) {
                if (b.criteria[k] > a.criteria[k]) all_le = false;
                if (b.criteria[k] < a.criteria[k]) one_lt = true;
            }
            if (all_le && one_lt) {
                dominated = true;
                break;
            }
        }
        if (!dominated) expected.insert(a.iteration);
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check.require(got == expected, "front differs from brute force (" +
                                       std::to_string(got.size()) + " vs " +
                                       std::to_string(expected.size()) + " entries)");
    check.require(elapsed < 5.0, "runtime " + fmt_double(elapsed) + " s exceeds 5 s");
    check.note(std::to_string(got.size()) + " nondominated, " + fmt_double(elapsed) + " s");
    return check;
}

double random_search_best(const ParameterSpace& space, Evaluator& evaluator, std::size_t draws,
                          std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x6a4du}));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < draws; ++i) {
        UnitVector u;
        u.values.resize(space.dimension());
        for (auto& v : u.values) v = rng.uniform();
        try {
            best = std::min(best, evaluator.evaluate(space.denormalize(u), rng.next_u64()).cost.eps_global);
        } catch (const SimulatorError&) {
        }
    }
    return best;
}

Check criterion_6_benchmark_superiority(std::vector<std::vector<ArchiveRecord>>& traces_out) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    std::string summary;
    for (const std::string function : {"sphere", "rosenbrock"}) {
        const BenchmarkProblem problem = BenchmarkProblem::make(function, 5, -2.0, 2.0);
        RunConfig config;
        config.space = problem.space();
        config.n_initial = 20;
        config.max_iterations = 100;
        config.retrain_period = 5;
        config.forest.n_trees = 300;
        config.forest.n_threads = 0;
        config.acquisition.n_starts = 10;
        config.n_runs = 1;

        std::vector<double> bo_bests, rs_bests;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            config.master_seed = seed * 1000 + 7;
            BenchmarkEvaluator evaluator(problem);
            RunState state = run_single(config, evaluator, 1);
            bo_bests.push_back(state.incumbent_value);
            traces_out.push_back(std::move(state.archive));
            BenchmarkEvaluator baseline(problem);
            rs_bests.push_back(
                random_search_best(config.space, baseline, 120, config.master_seed));
        }
        const double bo_median = median(bo_bests);
        const double rs_median = median(rs_bests);
        check.require(bo_median < rs_median,
                      function + ": BO median " + fmt_double(bo_median) +
                          " not below random-search median " + fmt_double(rs_median));
        summary += function + " BO " + fmt_double(bo_median) + " vs RS " + fmt_double(rs_median) + "; ";
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check.require(elapsed < 120.0, "runtime " + fmt_double(elapsed) + " s exceeds 2 min");
    check.note(summary + fmt_double(elapsed) + " s");
    return check;
}

Check criterion_7_toy_recovery(std::vector<std::vector<ArchiveRecord>>& traces_out) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();

    const ToyScenario scenario = ToyScenario::build({5000, 16, 4, 7});
    const ParameterSpace space = ToyScenario::default_space();
    const ParameterVector theta_star = ToyScenario::documented_theta_star();
    const std::uint64_t simulation_seed = 1234;
    const SimulationSummary targets = toy_simulate(scenario, space, theta_star, simulation_seed);

    RunConfig config;
    config.space = space;
    config.n_initial = 40;
    config.max_iterations = 160;
    config.retrain_period = 5;
    config.forest.n_trees = 1000;
    config.forest.n_threads = 0;
    config.acquisition.n_starts = 10;
    config.master_seed = 314159;
    config.n_runs = 3;
    config.max_wall_clock_seconds = 9 * 60.0;

    ToyEvaluator evaluator(scenario, space, targets, simulation_seed);
    const std::vector<RunState> states = run_many(config, evaluator);

    double initial_best = std::numeric_limits<double>::infinity();
    double cross_best = std::numeric_limits<double>::infinity();
    for (const auto& state : states) {
        for (const auto& record : state.archive) {
            if (record.iteration <= config.n_initial) {
                initial_best = std::min(initial_best, record.objective());
            }
        }
        cross_best = std::min(cross_best, state.incumbent_value);
    }

    std::vector<double> rs_bests;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        ToyEvaluator baseline(scenario, space, targets, simulation_seed);
        rs_bests.push_back(random_search_best(space, baseline, 200, seed * 77));
    }
    const double rs_median = median(rs_bests);

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check.require(cross_best <= 0.5 * initial_best,
                  "cross-run best " + fmt_double(cross_best) + " above half the design best " +
                      fmt_double(initial_best));
    check.require(cross_best <= rs_median, "cross-run best " + fmt_double(cross_best) +
                                               " above random-search median " +
                                               fmt_double(rs_median));
    check.require(elapsed <= 600.0, "runtime " + fmt_double(elapsed) + " s exceeds 10 min");
    check.note("best " + fmt_double(cross_best) + " vs design best " + fmt_double(initial_best) +
               " and RS median " + fmt_double(rs_median) + ", " + fmt_double(elapsed) + " s");

    for (const auto& state : states) traces_out.push_back(state.archive);
    return check;
}

Check criterion_8_monotone_incumbent(const std::vector<std::vector<ArchiveRecord>>& archives) {
    Check check;
    std::size_t runs_checked = 0;
    for (const auto& archive : archives) {
        double incumbent = std::numeric_limits<double>::infinity();
        double previous = std::numeric_limits<double>::infinity();
        for (const auto& record : archive) {
            incumbent = std::min(incumbent, record.objective());
            if (incumbent > previous) {
                check.require(false, "incumbent increased in a recorded run");
                return check;
            }
            previous = incumbent;
        }
        ++runs_checked;
    }
    check.note(std::to_string(runs_checked) + " run traces verified");
    return check;
}

int run_process(const std::string& command) {
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Check criterion_9_determinism(const fs::path& scratch) {
    Check check;
    const fs::path base = scratch / "determinism";
    for (const char* leg : {"a", "b"}) {
        const fs::path dir = base / leg;
        fs::create_directories(dir);
        if (run_process("cd '" + dir.string() + "' && '" + ABM_CALIB_BIN +
                        "' init . > /dev/null 2>&1") != 0) {
            check.require(false, "init failed");
            return check;
        }
        ToolConfig config = ToolConfig::load((dir / "config.json").string());
        config.toy.agents = 600;
        config.initial_samples = 10;
        config.iterations = 15;
        config.runs = 2;
        config.master_seed = 424242;
        config.forest.n_trees = 120;
        config.forest.n_threads = 0;
        write_text_file((dir / "run.json").string(), config.to_json());
        if (run_process("cd '" + dir.string() + "' && '" + ABM_CALIB_BIN +
                        "' calibrate --config run.json > /dev/null 2>&1") != 0) {
            check.require(false, "calibrate failed");
            return check;
        }
    }
    for (const char* artifact :
         {"runs/run_1/archive.jsonl", "runs/run_2/archive.jsonl", "runs/trace.csv"}) {
        const std::string a = read_text_file((base / "a" / artifact).string());
        const std::string b = read_text_file((base / "b" / artifact).string());
        if (a != b) {
            check.require(false, std::string(artifact) + " differs between identical executions");
            return check;
        }
    }
    check.note("archives and trace byte-identical across executions");
    return check;
}

Check criterion_10_failure_resilience(const fs::path& scratch) {
    Check check;
    const fs::path dir = scratch / "flaky";
    fs::create_directories(dir);

    // Stub simulator: counts invocations in a file, fails on calls 7, 19
    // and 33 out of 50, otherwise echoes fixed valid outputs.
    const fs::path stub = dir / "flaky_sim.sh";
    write_text_file(stub.string(), R"(#!/bin/sh
count_file="counter.txt"
n=0
[ -f "$count_file" ] && n=$(cat "$count_file")
n=$((n + 1))
echo "$n" > "$count_file"
case "$n" in
  7|19|33) echo "synthetic crash on call $n" >&2; exit 1 ;;
esac
printf '0,1\n40,10\n12,30\n' > od.csv
printf 'public,0.4\ncar,0.3\nwalk,0.2\nother,0.1\n' > modes.csv
printf '80,100\n' > workers.csv
)");
    ::chmod(stub.string().c_str(), 0755);

    SimulationSummary targets;
    targets.od = ODMatrix({0, 1});
    targets.od.at(0, 0) = 42.0;
    targets.od.at(0, 1) = 9.0;
    targets.od.at(1, 0) = 11.0;
    targets.od.at(1, 1) = 28.0;
    targets.modes = ModeShares{{0.35, 0.35, 0.2, 0.1}};
    targets.workers = {85, 100};

    ExternalSimulatorConfig external;
    external.command = stub.string();
    external.workdir = (dir / "work").string();
    external.timeout_seconds = 30.0;

    const ParameterSpace space = ParameterSpace::uniform_box(3, -1.0, 1.0, "beta");
    ExternalEvaluator evaluator(external, space, targets);

    RunConfig config;
    config.space = space;
    config.n_initial = 20;
    config.max_iterations = 30;
    config.retrain_period = 5;
    config.forest.n_trees = 60;
    config.forest.n_threads = 1;
    config.acquisition.n_starts = 5;
    config.master_seed = 11;
    config.n_runs = 1;

    const RunState state = run_single(config, evaluator, 1);
    check.require(!state.aborted, "run aborted instead of completing");
    check.require(state.archive.size() == 50,
                  "expected 50 records, got " + std::to_string(state.archive.size()));
    std::size_t failed = 0;
    for (const auto& record : state.archive) failed += record.failed ? 1 : 0;
    check.require(failed == 3, "expected 3 flagged failures, got " + std::to_string(failed));

    const std::size_t boundary = surrogate_training_boundary(config, state.archive.size());
    const TrainingSet training = surrogate_training_set(state.archive, boundary);
    check.require(training.size() == boundary - 3,
                  "training set kept " + std::to_string(training.size()) + " of " +
                      std::to_string(boundary) + " records despite 3 failures");
    check.note("3 failures flagged, training set " + std::to_string(training.size()) + "/" +
               std::to_string(boundary));
    return check;
}

} // namespace

int main() {
    const fs::path scratch =
        fs::temp_directory_path() / ("abmcalib_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(scratch);

    std::vector<std::vector<ArchiveRecord>> monotone_traces;

    std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"EI matches the Monte-Carlo oracle on the (mu, sigma) grid",
         [] { return criterion_1_ei_oracle(); }},
        {"surrogate mean/std equal independent per-tree aggregation",
         [] { return criterion_2_surrogate_aggregation(); }},
        {"Latin Hypercube stratification holds at (10,3) and (50,477)",
         [] { return criterion_3_lhs_property(); }},
        {"objective components reproduce the published values",
         [] { return criterion_4_objective_fidelity(); }},
        {"pareto front equals the brute-force front on 1000 vectors",
         [] { return criterion_5_pareto_oracle(); }},
        {"optimization beats equal-budget random search on benchmarks",
         [&] { return criterion_6_benchmark_superiority(monotone_traces); }},
        {"toy ground-truth recovery halves the initial-design best",
         [&] { return criterion_7_toy_recovery(monotone_traces); }},
        {"incumbent traces are non-increasing across all runs",
         [&] { return criterion_8_monotone_incumbent(monotone_traces); }},
        {"identical configs and seeds give byte-identical artifacts",
         [&] { return criterion_9_determinism(scratch); }},
        {"a flaky simulator leaves a completed run with excluded records",
         [&] { return criterion_10_failure_resilience(scratch); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        try {
            check = criteria[i].second();
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %zu: %s%s%s\n", check.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), check.detail.empty() ? "" : " — ",
                    check.detail.c_str());
        std::fflush(stdout);
        if (!check.ok) ++failures;
    }

    std::error_code ec;
    fs::remove_all(scratch, ec);
    return failures == 0 ? 0 : 1;
}
