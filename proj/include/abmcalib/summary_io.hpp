#pragma once

#include "abmcalib/param_space.hpp"
#include "abmcalib/summary.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace abmcalib {

// Readers and writers for the simulator file protocol. All formats are
// plain comma-separated UTF-8 with no quoting:
//   od.csv        first row district ids, then n rows of n counts (row = origin)
//   modes.csv     four rows: public,<s> car,<s> walk,<s> other,<s>
//   workers.csv   single row: <assigned>,<total>
//   schedules.csv header plus one row per leg, Table-style column order
//   params.csv    header name,value; one behavioral parameter per row

ODMatrix read_od_csv(const std::string& path);
void write_od_csv(const std::string& path, const ODMatrix& od);

ModeShares read_modes_csv(const std::string& path);
void write_modes_csv(const std::string& path, const ModeShares& modes);

WorkerCoverage read_workers_csv(const std::string& path);
void write_workers_csv(const std::string& path, const WorkerCoverage& workers);

std::vector<ScheduleRow> read_schedules_csv(const std::string& path);
void write_schedules_csv(const std::string& path, const std::vector<ScheduleRow>& rows);

void write_params_csv(const std::string& path, const ParameterSpace& space,
                      const ParameterVector& theta);
/// Returns the values for `space` read from a name,value file; every space
/// parameter must be present, unknown names are rejected.
ParameterVector read_params_csv(const std::string& path, const ParameterSpace& space);

/// Loads od/modes/workers (and schedules when present) from a directory.
/// When schedules are available the named aux totals are rebuilt from them,
/// using zone_district when given and zone id == district id otherwise.
SimulationSummary load_summary_dir(const std::string& dir,
                                   const std::map<int, std::size_t>* zone_district = nullptr);

/// Writes the summary's files into a directory (schedules only if present).
void write_summary_dir(const std::string& dir, const SimulationSummary& summary);

/// Rebuilds aux_counts (legs by tour type, per-district anchor arrivals)
/// from schedule rows.
std::map<std::string, double> aux_from_schedules(const std::vector<ScheduleRow>& rows,
                                                 std::size_t n_districts,
                                                 const std::map<int, std::size_t>& zone_district);

} // namespace abmcalib
