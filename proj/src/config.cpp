#include "abmcalib/config.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/text.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

namespace abmcalib {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<const char*, 6> kThresholdKeys{
    "max_mode_share_error",     "max_work_spatial_error", "max_education_spatial_error",
    "max_worker_count_error",   "max_total_legs_error",   "max_spatial_legs_error"};

class ConfigReader {
public:
    explicit ConfigReader(const Json& root) : root_(root) {}

    template <typename T>
    void read(const Json& obj, const char* section, const char* key, T& out) {
        if (!obj.contains(key) || obj.at(key).is_null()) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const Json::exception&) {
            fail(std::string(section) + "." + key + ": wrong type");
        }
    }

    const Json* section(const char* name) {
        if (!root_.contains(name)) return nullptr;
        if (!root_.at(name).is_object()) {
            fail(std::string(name) + ": expected an object");
            return nullptr;
        }
        return &root_.at(name);
    }

    void fail(const std::string& message) { errors_.push_back(message); }

    void check(bool ok, const std::string& message) {
        if (!ok) fail(message);
    }

    void raise_if_failed() const {
        if (errors_.empty()) return;
        std::string what = "configuration rejected:";
        for (const auto& e : errors_) {
            what += "\n  - " + e;
        }
        throw ConfigError(what);
    }

private:
    const Json& root_;
    std::vector<std::string> errors_;
};

std::uint64_t parse_seed(const Json& value, ConfigReader& reader, const char* where) {
    // Seeds are accepted as numbers or decimal strings (full 64-bit range).
    if (value.is_string()) {
        try {
            return std::stoull(value.get<std::string>());
        } catch (...) {
            reader.fail(std::string(where) + ": not a valid seed string");
            return 0;
        }
    }
    if (value.is_number_unsigned() || value.is_number_integer()) {
        return value.get<std::uint64_t>();
    }
    reader.fail(std::string(where) + ": seed must be an integer or decimal string");
    return 0;
}

} // namespace

ToolConfig ToolConfig::load(const std::string& path) {
    Json root;
    try {
        // Comment-tolerant parse so the emitted template stays annotated.
        root = Json::parse(read_text_file(path), nullptr, true, true);
    } catch (const IoError&) {
        throw ConfigError("cannot open config file: " + path);
    } catch (const Json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config file " + path + " must hold a JSON object");
    }

    ToolConfig config;
    config.base_dir = std::filesystem::absolute(std::filesystem::path(path)).parent_path();

    ConfigReader reader(root);
    reader.read(root, "", "space_file", config.space_file);
    reader.read(root, "", "targets_dir", config.targets_dir);
    reader.read(root, "", "output_dir", config.output_dir);

    if (const Json* simulator = reader.section("simulator")) {
        std::string binding = "toy";
        reader.read(*simulator, "simulator", "binding", binding);
        if (binding == "toy") {
            config.binding = SimulatorBinding::Toy;
        } else if (binding == "external") {
            config.binding = SimulatorBinding::External;
        } else if (binding == "benchmark") {
            config.binding = SimulatorBinding::Benchmark;
        } else {
            reader.fail("simulator.binding: expected toy, external or benchmark");
        }
        if (simulator->contains("toy") && simulator->at("toy").is_object()) {
            const Json& toy = simulator->at("toy");
            reader.read(toy, "simulator.toy", "agents", config.toy.agents);
            reader.read(toy, "simulator.toy", "zones", config.toy.zones);
            reader.read(toy, "simulator.toy", "districts", config.toy.districts);
            if (toy.contains("scenario_seed")) {
                config.toy.scenario_seed =
                    parse_seed(toy.at("scenario_seed"), reader, "simulator.toy.scenario_seed");
            }
            if (toy.contains("simulation_seed")) {
                config.toy.simulation_seed =
                    parse_seed(toy.at("simulation_seed"), reader, "simulator.toy.simulation_seed");
            }
        }
        if (simulator->contains("external") && simulator->at("external").is_object()) {
            const Json& ext = simulator->at("external");
            reader.read(ext, "simulator.external", "command", config.external.command);
            reader.read(ext, "simulator.external", "workdir", config.external.workdir);
            reader.read(ext, "simulator.external", "timeout_seconds",
                        config.external.timeout_seconds);
        }
        if (simulator->contains("benchmark") && simulator->at("benchmark").is_object()) {
            const Json& bench = simulator->at("benchmark");
            reader.read(bench, "simulator.benchmark", "function", config.benchmark.function);
            reader.read(bench, "simulator.benchmark", "dimension", config.benchmark.dimension);
            double bound = 0.0;
            if (bench.contains("lower") && !bench.at("lower").is_null()) {
                reader.read(bench, "simulator.benchmark", "lower", bound);
                config.benchmark.lower = bound;
            }
            if (bench.contains("upper") && !bench.at("upper").is_null()) {
                reader.read(bench, "simulator.benchmark", "upper", bound);
                config.benchmark.upper = bound;
            }
        }
    }

    if (const Json* opt = reader.section("optimization")) {
        reader.read(*opt, "optimization", "initial_samples", config.initial_samples);
        reader.read(*opt, "optimization", "iterations", config.iterations);
        reader.read(*opt, "optimization", "wall_clock_hours", config.wall_clock_hours);
        reader.read(*opt, "optimization", "retrain_every", config.retrain_every);
        reader.read(*opt, "optimization", "runs", config.runs);
        reader.read(*opt, "optimization", "failure_cap", config.failure_cap);
        if (opt->contains("master_seed")) {
            config.master_seed =
                parse_seed(opt->at("master_seed"), reader, "optimization.master_seed");
        }
    }

    if (const Json* forest = reader.section("random_forest")) {
        reader.read(*forest, "random_forest", "trees", config.forest.n_trees);
        reader.read(*forest, "random_forest", "min_samples_leaf", config.forest.min_samples_leaf);
        reader.read(*forest, "random_forest", "max_features", config.forest.max_features);
        reader.read(*forest, "random_forest", "threads", config.forest.n_threads);
    }

    if (const Json* acq = reader.section("acquisition")) {
        reader.read(*acq, "acquisition", "starts", config.acquisition.n_starts);
        reader.read(*acq, "acquisition", "max_iterations", config.acquisition.max_iterations);
        reader.read(*acq, "acquisition", "gradient_step", config.acquisition.fd_step);
    }

    if (const Json* pareto = reader.section("pareto")) {
        for (std::size_t i = 0; i < kThresholdKeys.size(); ++i) {
            if (pareto->contains(kThresholdKeys[i]) && !pareto->at(kThresholdKeys[i]).is_null()) {
                reader.read(*pareto, "pareto", kThresholdKeys[i], config.pareto.thresholds[i]);
            }
        }
    }

    // Semantic checks, reported together.
    reader.check(config.initial_samples >= 2, "optimization.initial_samples: must be at least 2");
    reader.check(config.retrain_every >= 1, "optimization.retrain_every: must be at least 1");
    reader.check(config.runs >= 1, "optimization.runs: must be at least 1");
    reader.check(config.wall_clock_hours > 0.0, "optimization.wall_clock_hours: must be positive");
    reader.check(config.forest.n_trees >= 1, "random_forest.trees: must be at least 1");
    reader.check(config.acquisition.n_starts >= 1, "acquisition.starts: must be at least 1");
    reader.check(config.acquisition.fd_step > 0.0, "acquisition.gradient_step: must be positive");
    if (config.binding == SimulatorBinding::Toy) {
        reader.check(config.toy.agents >= 1, "simulator.toy.agents: must be at least 1");
        reader.check(config.toy.districts >= 1 && config.toy.zones % config.toy.districts == 0,
                     "simulator.toy.zones: must be a positive multiple of districts");
    }
    if (config.binding == SimulatorBinding::External) {
        reader.check(!config.external.command.empty(), "simulator.external.command: required");
        reader.check(config.external.timeout_seconds > 0.0,
                     "simulator.external.timeout_seconds: must be positive");
    }
    if (config.binding == SimulatorBinding::Benchmark) {
        reader.check(config.benchmark.function == "sphere" ||
                         config.benchmark.function == "rosenbrock" ||
                         config.benchmark.function == "rastrigin",
                     "simulator.benchmark.function: expected sphere, rosenbrock or rastrigin");
        reader.check(config.benchmark.dimension >= 1,
                     "simulator.benchmark.dimension: must be at least 1");
        reader.check(config.benchmark.lower.has_value() == config.benchmark.upper.has_value(),
                     "simulator.benchmark: lower and upper must be given together");
        if (config.benchmark.lower && config.benchmark.upper) {
            reader.check(*config.benchmark.lower < *config.benchmark.upper,
                         "simulator.benchmark: lower must be strictly below upper");
        }
    }
    for (std::size_t i = 0; i < kThresholdKeys.size(); ++i) {
        reader.check(config.pareto.thresholds[i] > 0.0,
                     std::string("pareto.") + kThresholdKeys[i] + ": must be positive");
    }
    reader.raise_if_failed();
    return config;
}

std::string ToolConfig::to_json() const {
    Json root;
    root["space_file"] = space_file;
    root["targets_dir"] = targets_dir;
    root["output_dir"] = output_dir;

    Json simulator;
    switch (binding) {
        case SimulatorBinding::Toy: simulator["binding"] = "toy"; break;
        case SimulatorBinding::External: simulator["binding"] = "external"; break;
        case SimulatorBinding::Benchmark: simulator["binding"] = "benchmark"; break;
    }
    simulator["toy"] = Json{{"agents", toy.agents},
                            {"zones", toy.zones},
                            {"districts", toy.districts},
                            {"scenario_seed", toy.scenario_seed},
                            {"simulation_seed", toy.simulation_seed}};
    simulator["external"] = Json{{"command", external.command},
                                 {"workdir", external.workdir},
                                 {"timeout_seconds", external.timeout_seconds}};
    Json bench{{"function", benchmark.function}, {"dimension", benchmark.dimension}};
    bench["lower"] = benchmark.lower ? Json(*benchmark.lower) : Json(nullptr);
    bench["upper"] = benchmark.upper ? Json(*benchmark.upper) : Json(nullptr);
    simulator["benchmark"] = bench;
    root["simulator"] = simulator;

    root["optimization"] = Json{{"initial_samples", initial_samples},
                                {"iterations", iterations},
                                {"wall_clock_hours", wall_clock_hours},
                                {"retrain_every", retrain_every},
                                {"runs", runs},
                                {"master_seed", master_seed},
                                {"failure_cap", failure_cap}};
    root["random_forest"] = Json{{"trees", forest.n_trees},
                                 {"min_samples_leaf", forest.min_samples_leaf},
                                 {"max_features", forest.max_features},
                                 {"threads", forest.n_threads}};
    root["acquisition"] = Json{{"starts", acquisition.n_starts},
                               {"max_iterations", acquisition.max_iterations},
                               {"gradient_step", acquisition.fd_step}};
    Json pareto_json;
    for (std::size_t i = 0; i < kThresholdKeys.size(); ++i) {
        pareto_json[kThresholdKeys[i]] = std::isinf(pareto.thresholds[i])
                                             ? Json(nullptr)
                                             : Json(pareto.thresholds[i]);
    }
    root["pareto"] = pareto_json;
    return root.dump(2) + "\n";
}

std::string ToolConfig::template_text() {
    return R"(// abm-calib configuration.
// Relative paths resolve against this file's directory.
{
  // Search space definition: CSV with header name,lower,upper,initial.
  "space_file": "space.csv",
  // Baseline observations the simulator is scored against:
  // od.csv, modes.csv, workers.csv (schedules.csv enables the
  // work/education spatial criteria of the Pareto report).
  "targets_dir": "targets",
  // Run artifacts: run_<id>/archive.jsonl, checkpoints, trace.csv,
  // best.csv, pareto_report.csv, calibration.log.
  "output_dir": "runs",

  "simulator": {
    // toy       - built-in nested-logit microsimulator (ground truth known)
    // external  - child process speaking the params/od/modes/workers files
    // benchmark - analytic test functions (sphere, rosenbrock, rastrigin)
    "binding": "toy",
    "toy": {
      "agents": 5000,
      "zones": 16,
      "districts": 4,
      // Fixes the synthetic population.
      "scenario_seed": 7,
      // One simulator seed for the whole calibration (common random
      // numbers): the generated targets are exactly recoverable.
      "simulation_seed": 1234
    },
    "external": {
      // Split on whitespace, no shell. {workdir}, {params} and {seed}
      // are substituted; the child runs inside workdir.
      "command": "./simulator.sh {params}",
      "workdir": "sim_work",
      "timeout_seconds": 3600
    },
    "benchmark": {
      "function": "sphere",
      "dimension": 5,
      // null selects the classic box for the chosen function.
      "lower": null,
      "upper": null
    }
  },

  "optimization": {
    // Size of the Latin Hypercube initial design.
    "initial_samples": 50,
    // Acquisition evaluations after the initial design.
    "iterations": 500,
    // Hard wall-clock ceiling per run.
    "wall_clock_hours": 1.0,
    // Surrogate refit cadence (evaluations per retrain).
    "retrain_every": 5,
    // Independent restarts with distinct seeds and designs.
    "runs": 5,
    "master_seed": 20150701,
    // Tolerated simulator failures per run before aborting it.
    "failure_cap": 10
  },

  "random_forest": {
    // Ensemble size; published settings used 1000, 3000 or 5000.
    "trees": 1000,
    "min_samples_leaf": 1,
    // 0 selects ceil(d / 3) candidate dimensions per split.
    "max_features": 0,
    // 0 selects all hardware threads for tree fitting.
    "threads": 0
  },

  "acquisition": {
    // Multi-start count for the box-constrained quasi-Newton search
    // (the incumbent is always added as an extra start).
    "starts": 10,
    // Iteration cap per start.
    "max_iterations": 1000,
    // Central-difference step in normalized [0,1] coordinates; wide on
    // purpose so gradients bridge the plateaus of the forest surface.
    "gradient_step": 0.5
  },

  "pareto": {
    // Feasibility cutoffs for the six robustness criteria; a record is
    // kept when every criterion is strictly below its cutoff.
    // null means no cutoff (dominance filtering only).
    "max_mode_share_error": 0.10,
    "max_work_spatial_error": null,
    "max_education_spatial_error": null,
    "max_worker_count_error": null,
    "max_total_legs_error": null,
    "max_spatial_legs_error": null
  }
}
)";
}

std::string ToolConfig::resolve(const std::string& relative) const {
    const std::filesystem::path p(relative);
    if (p.is_absolute()) return relative;
    return (base_dir / p).lexically_normal().string();
}

std::string ToolConfig::fingerprint() const {
    // FNV-1a over the seed-relevant configuration and input file contents.
    auto fnv = [](std::uint64_t h, const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    };
    std::uint64_t h = 14695981039346656037ULL;

    Json j;
    j["binding"] = static_cast<int>(binding);
    j["toy"] = Json{{"agents", toy.agents},
                    {"zones", toy.zones},
                    {"districts", toy.districts},
                    {"scenario_seed", toy.scenario_seed},
                    {"simulation_seed", toy.simulation_seed}};
    j["benchmark"] = Json{{"function", benchmark.function},
                          {"dimension", benchmark.dimension},
                          {"lower", benchmark.lower ? Json(*benchmark.lower) : Json(nullptr)},
                          {"upper", benchmark.upper ? Json(*benchmark.upper) : Json(nullptr)}};
    j["external_command"] = external.command;
    j["optimization"] = Json{{"initial_samples", initial_samples},
                             {"retrain_every", retrain_every},
                             {"master_seed", master_seed}};
    j["forest"] = Json{{"trees", forest.n_trees},
                       {"min_samples_leaf", forest.min_samples_leaf},
                       {"max_features", forest.max_features}};
    j["acquisition"] = Json{{"starts", acquisition.n_starts},
                            {"max_iterations", acquisition.max_iterations},
                            {"gradient_step", acquisition.fd_step}};
    h = fnv(h, j.dump());

    if (binding != SimulatorBinding::Benchmark) {
        try {
            h = fnv(h, read_text_file(resolve(space_file)));
        } catch (const IoError&) {
            // Missing file surfaces later as a config error; the hash just
            // reflects its absence.
            h = fnv(h, "<no-space>");
        }
        for (const char* name : {"od.csv", "modes.csv", "workers.csv"}) {
            try {
                h = fnv(h, read_text_file(
                                (std::filesystem::path(resolve(targets_dir)) / name).string()));
            } catch (const IoError&) {
                h = fnv(h, "<no-target>");
            }
        }
    }

    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace abmcalib
