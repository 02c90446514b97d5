#pragma once

#include "abmcalib/config.hpp"

#include <atomic>
#include <optional>
#include <string>
#include <vector>

namespace abmcalib::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;      // unexpected error
inline constexpr int kExitConfig = 2;       // configuration rejected
inline constexpr int kExitSimulator = 3;    // simulator failure cap tripped
inline constexpr int kExitIo = 4;           // filesystem failure
inline constexpr int kExitInterrupted = 130;

/// Cooperative interrupt flag; the signal handler in the binary sets it and
/// calibration loops drain to valid artifacts before returning.
std::atomic<bool>& interrupt_flag();

/// Writes a commented config template plus a ready-to-run example: the
/// 24-parameter space file and toy targets generated at the documented
/// ground-truth parameter values (stored alongside as theta_star.csv).
int cmd_init(const std::string& directory, bool force);

struct CalibrateOptions {
    bool resume = false;
    bool force = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
};

int cmd_calibrate(const std::string& config_path, const CalibrateOptions& options);

/// Runs the bound simulator once on a name,value parameter file and prints
/// the cost components and criteria as a one-row CSV on stdout.
int cmd_evaluate(const std::string& config_path, const std::string& params_path);

/// Rebuilds pareto_report.csv from the run archives (or from evaluate-format
/// CSV files when given) and prints a short summary.
int cmd_pareto(const std::string& config_path, const std::vector<std::string>& from_csv);

/// Prints a per-run and cross-run summary of an output directory.
int cmd_report(const std::string& config_path);

} // namespace abmcalib::cli
