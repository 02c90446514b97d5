#pragma once

#include "abmcalib/bo_engine.hpp"
#include "abmcalib/external_simulator.hpp"
#include "abmcalib/pareto.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace abmcalib {

enum class SimulatorBinding { Toy, External, Benchmark };

struct ToyBindingConfig {
    std::size_t agents = 5000;
    std::size_t zones = 16;
    std::size_t districts = 4;
    std::uint64_t scenario_seed = 7;
    std::uint64_t simulation_seed = 1234; // common random numbers across evaluations
};

struct BenchmarkBindingConfig {
    std::string function = "sphere";
    std::size_t dimension = 5;
    std::optional<double> lower; // default bounds of the named function when absent
    std::optional<double> upper;
};

/// Everything the command-line surface needs: file locations, the simulator
/// binding, and the optimization knobs (key names mirror the published
/// hyperparameter table). Relative paths resolve against the config file's
/// directory.
struct ToolConfig {
    std::filesystem::path base_dir = ".";

    std::string space_file = "space.csv";
    std::string targets_dir = "targets";
    std::string output_dir = "runs";

    SimulatorBinding binding = SimulatorBinding::Toy;
    ToyBindingConfig toy;
    ExternalSimulatorConfig external;
    BenchmarkBindingConfig benchmark;

    std::size_t initial_samples = 50;
    std::size_t iterations = 500;
    double wall_clock_hours = 1.0;
    std::size_t retrain_every = 5;
    std::size_t runs = 5;
    std::uint64_t master_seed = 20150701;
    std::size_t failure_cap = 10;

    ForestHyperparams forest;         // trees, min_samples_leaf, max_features, threads
    AcquisitionOptions acquisition;   // starts, max_iterations, gradient_step

    ParetoConfig pareto;

    static ToolConfig load(const std::string& path); // throws ConfigError with every problem found
    std::string to_json() const;                     // canonical, comment-free
    static std::string template_text();              // fully commented starter config

    std::string resolve(const std::string& relative) const;

    /// Hash of every seed-relevant setting plus the space and target file
    /// contents; checkpoints refuse to resume when it changes.
    std::string fingerprint() const;
};

} // namespace abmcalib
