#pragma once

#include "abmcalib/param_space.hpp"
#include "abmcalib/summary.hpp"

#include <cstdint>
#include <string>

namespace abmcalib {

/// Child-process binding for real simulators. The command is split on
/// whitespace (no shell); occurrences of {workdir}, {params} and {seed}
/// in any argument are substituted before launch. The child runs with the
/// working directory set to workdir, exit code 0 means success, and its
/// stdout/stderr are captured for diagnostics.
struct ExternalSimulatorConfig {
    std::string command;
    std::string workdir;
    double timeout_seconds = 3600.0;
};

/// Writes params.csv into the workdir, launches the command, waits up to
/// the timeout, then parses od.csv, modes.csv, workers.csv (and
/// schedules.csv when the simulator produced one) from the workdir.
/// Throws SimulatorError on nonzero exit (with captured output),
/// TimeoutError past the deadline, ParseError on malformed output files.
SimulationSummary external_evaluate(const ExternalSimulatorConfig& config,
                                    const ParameterSpace& space, const ParameterVector& theta,
                                    std::uint64_t seed = 0);

} // namespace abmcalib
