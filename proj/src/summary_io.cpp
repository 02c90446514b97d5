#include "abmcalib/summary_io.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/text.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace abmcalib {

namespace {

std::vector<std::string> non_empty_lines(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

const char* kScheduleHeader =
    "person_id,tour_no,tour_type,stop_no,stop_type,stop_location,stop_mode,primary_stop,"
    "arrival_time,departure_time,prev_stop_location,prev_stop_departure_time";

Mode parse_mode(std::string_view token, const std::string& path, std::size_t line_no) {
    if (token == "PT") return Mode::Public;
    if (token == "car") return Mode::Car;
    if (token == "walk") return Mode::Walk;
    if (token == "other") return Mode::Other;
    throw ParseError(path, line_no, "unknown mode '" + std::string(token) + "'");
}

const char* mode_token(Mode m) {
    switch (m) {
        case Mode::Public: return "PT";
        case Mode::Car: return "car";
        case Mode::Walk: return "walk";
        case Mode::Other: return "other";
    }
    return "other";
}

TourType parse_tour_type(std::string_view token, const std::string& path, std::size_t line_no) {
    for (std::size_t i = 0; i < kTourTypeNames.size(); ++i) {
        if (token == kTourTypeNames[i]) return static_cast<TourType>(i);
    }
    throw ParseError(path, line_no, "unknown tour type '" + std::string(token) + "'");
}

} // namespace

ODMatrix read_od_csv(const std::string& path) {
    const auto lines = non_empty_lines(path);
    if (lines.empty()) {
        throw ParseError(path, 1, "empty OD file");
    }
    const auto header = split_csv(lines[0]);
    const std::size_t n = header.size();
    ODMatrix od;
    od.district_ids.reserve(n);
    try {
        for (const auto& field : header) {
            od.district_ids.push_back(static_cast<int>(parse_int(field)));
        }
    } catch (const InputError& e) {
        throw ParseError(path, 1, e.what());
    }
    if (lines.size() != n + 1) {
        throw ParseError(path, lines.size(), "expected " + std::to_string(n) +
                                                 " count rows after the district header, got " +
                                                 std::to_string(lines.size() - 1));
    }
    od.counts.reserve(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto fields = split_csv(lines[r + 1]);
        if (fields.size() != n) {
            throw ParseError(path, r + 2, "expected " + std::to_string(n) + " counts, got " +
                                              std::to_string(fields.size()));
        }
        for (const auto& field : fields) {
            double value = 0.0;
            try {
                value = parse_double(field);
            } catch (const InputError& e) {
                throw ParseError(path, r + 2, e.what());
            }
            if (value < 0.0) {
                throw ParseError(path, r + 2, "negative OD count");
            }
            od.counts.push_back(value);
        }
    }
    return od;
}

void write_od_csv(const std::string& path, const ODMatrix& od) {
    std::string out;
    for (std::size_t j = 0; j < od.n(); ++j) {
        if (j > 0) out += ',';
        out += std::to_string(od.district_ids[j]);
    }
    out += '\n';
    for (std::size_t i = 0; i < od.n(); ++i) {
        for (std::size_t j = 0; j < od.n(); ++j) {
            if (j > 0) out += ',';
            out += fmt_double(od.at(i, j));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

ModeShares read_modes_csv(const std::string& path) {
    const auto lines = non_empty_lines(path);
    if (lines.size() != kModeCount) {
        throw ParseError(path, lines.size(), "expected exactly 4 mode rows");
    }
    ModeShares modes;
    for (std::size_t i = 0; i < kModeCount; ++i) {
        const auto fields = split_csv(lines[i]);
        if (fields.size() != 2 || fields[0] != kModeNames[i]) {
            throw ParseError(path, i + 1,
                             std::string("expected row '") + kModeNames[i] + ",<share>'");
        }
        try {
            modes.shares[i] = parse_double(fields[1]);
        } catch (const InputError& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    return modes;
}

void write_modes_csv(const std::string& path, const ModeShares& modes) {
    std::string out;
    for (std::size_t i = 0; i < kModeCount; ++i) {
        out += kModeNames[i];
        out += ',';
        out += fmt_double(modes.shares[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

WorkerCoverage read_workers_csv(const std::string& path) {
    const auto lines = non_empty_lines(path);
    if (lines.size() != 1) {
        throw ParseError(path, lines.size(), "expected a single 'assigned,total' row");
    }
    const auto fields = split_csv(lines[0]);
    if (fields.size() != 2) {
        throw ParseError(path, 1, "expected two fields 'assigned,total'");
    }
    WorkerCoverage w;
    try {
        w.assigned = parse_int(fields[0]);
        w.total = parse_int(fields[1]);
    } catch (const InputError& e) {
        throw ParseError(path, 1, e.what());
    }
    if (w.total <= 0 || w.assigned < 0 || w.assigned > w.total) {
        throw ParseError(path, 1, "worker coverage must satisfy 0 <= assigned <= total, total > 0");
    }
    return w;
}

void write_workers_csv(const std::string& path, const WorkerCoverage& workers) {
    write_text_file(path,
                    std::to_string(workers.assigned) + "," + std::to_string(workers.total) + "\n");
}

std::vector<ScheduleRow> read_schedules_csv(const std::string& path) {
    const auto lines = non_empty_lines(path);
    if (lines.empty() || trim(lines[0]) != kScheduleHeader) {
        throw ParseError(path, 1, "bad schedules header");
    }
    std::vector<ScheduleRow> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv(lines[i]);
        if (f.size() != 12) {
            throw ParseError(path, i + 1, "expected 12 fields, got " + std::to_string(f.size()));
        }
        try {
            ScheduleRow row;
            row.person_id = parse_int(f[0]);
            row.tour_no = static_cast<int>(parse_int(f[1]));
            row.tour_type = parse_tour_type(f[2], path, i + 1);
            row.stop_no = static_cast<int>(parse_int(f[3]));
            row.stop_type = std::string(f[4]);
            row.stop_location = static_cast<int>(parse_int(f[5]));
            row.stop_mode = parse_mode(f[6], path, i + 1);
            if (f[7] == "True") {
                row.primary_stop = true;
            } else if (f[7] == "False") {
                row.primary_stop = false;
            } else {
                throw ParseError(path, i + 1, "primary_stop must be True or False");
            }
            row.arrival_time = parse_double(f[8]);
            row.departure_time = parse_double(f[9]);
            row.prev_stop_location = static_cast<int>(parse_int(f[10]));
            row.prev_stop_departure_time = parse_double(f[11]);
            rows.push_back(std::move(row));
        } catch (const InputError& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    return rows;
}

void write_schedules_csv(const std::string& path, const std::vector<ScheduleRow>& rows) {
    std::string out = kScheduleHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.person_id);
        out += ',';
        out += std::to_string(r.tour_no);
        out += ',';
        out += kTourTypeNames[static_cast<std::size_t>(r.tour_type)];
        out += ',';
        out += std::to_string(r.stop_no);
        out += ',';
        out += r.stop_type;
        out += ',';
        out += std::to_string(r.stop_location);
        out += ',';
        out += mode_token(r.stop_mode);
        out += ',';
        out += r.primary_stop ? "True" : "False";
        out += ',';
        out += fmt_double(r.arrival_time);
        out += ',';
        out += fmt_double(r.departure_time);
        out += ',';
        out += std::to_string(r.prev_stop_location);
        out += ',';
        out += fmt_double(r.prev_stop_departure_time);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_params_csv(const std::string& path, const ParameterSpace& space,
                      const ParameterVector& theta) {
    if (theta.size() != space.dimension()) {
        throw InputError("write_params_csv: theta dimension mismatch");
    }
    std::string out = "name,value\n";
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        out += space.spec(i).name;
        out += ',';
        out += fmt_double(theta[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

ParameterVector read_params_csv(const std::string& path, const ParameterSpace& space) {
    const auto lines = non_empty_lines(path);
    if (lines.empty() || trim(lines[0]) != "name,value") {
        throw ParseError(path, 1, "expected header 'name,value'");
    }
    std::vector<bool> seen(space.dimension(), false);
    ParameterVector theta;
    theta.values.resize(space.dimension());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv(lines[i]);
        if (f.size() != 2) {
            throw ParseError(path, i + 1, "expected 2 fields");
        }
        const std::string name(f[0]);
        if (!space.contains(name)) {
            throw ParseError(path, i + 1, "unknown parameter '" + name + "'");
        }
        const std::size_t idx = space.index_of(name);
        if (seen[idx]) {
            throw ParseError(path, i + 1, "duplicate parameter '" + name + "'");
        }
        try {
            theta.values[idx] = parse_double(f[1]);
        } catch (const InputError& e) {
            throw ParseError(path, i + 1, e.what());
        }
        seen[idx] = true;
    }
    std::string missing;
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        if (!seen[i]) {
            if (!missing.empty()) missing += ", ";
            missing += space.spec(i).name;
        }
    }
    if (!missing.empty()) {
        throw ParseError(path, lines.size(), "missing parameters: " + missing);
    }
    return theta;
}

std::map<std::string, double> aux_from_schedules(const std::vector<ScheduleRow>& rows,
                                                 std::size_t n_districts,
                                                 const std::map<int, std::size_t>& zone_district) {
    std::map<std::string, double> aux;
    std::vector<double> work_dest(n_districts, 0.0);
    std::vector<double> edu_dest(n_districts, 0.0);
    std::array<double, 4> legs_by_type{};
    for (const auto& row : rows) {
        legs_by_type[static_cast<std::size_t>(row.tour_type)] += 1.0;
        if (!row.primary_stop) continue;
        const auto it = zone_district.find(row.stop_location);
        if (it == zone_district.end()) {
            throw InputError("schedule stop location " + std::to_string(row.stop_location) +
                             " has no district mapping");
        }
        if (row.tour_type == TourType::Work) {
            work_dest[it->second] += 1.0;
        } else if (row.tour_type == TourType::Education) {
            edu_dest[it->second] += 1.0;
        }
    }
    aux["legs_total"] = static_cast<double>(rows.size());
    aux["legs_work"] = legs_by_type[static_cast<std::size_t>(TourType::Work)];
    aux["legs_education"] = legs_by_type[static_cast<std::size_t>(TourType::Education)];
    aux["legs_shop"] = legs_by_type[static_cast<std::size_t>(TourType::Shop)];
    aux["legs_other"] = legs_by_type[static_cast<std::size_t>(TourType::Other)];
    for (std::size_t d = 0; d < n_districts; ++d) {
        aux["work_dest_district_" + std::to_string(d)] = work_dest[d];
        aux["edu_dest_district_" + std::to_string(d)] = edu_dest[d];
    }
    return aux;
}

SimulationSummary load_summary_dir(const std::string& dir,
                                   const std::map<int, std::size_t>* zone_district) {
    namespace fs = std::filesystem;
    SimulationSummary summary;
    summary.od = read_od_csv((fs::path(dir) / "od.csv").string());
    summary.modes = read_modes_csv((fs::path(dir) / "modes.csv").string());
    summary.workers = read_workers_csv((fs::path(dir) / "workers.csv").string());
    summary.zero_trips = summary.od.total() <= 0.0;

    const fs::path schedules_path = fs::path(dir) / "schedules.csv";
    if (fs::exists(schedules_path)) {
        summary.schedules = read_schedules_csv(schedules_path.string());
        std::map<int, std::size_t> identity;
        if (zone_district == nullptr) {
            for (std::size_t d = 0; d < summary.od.n(); ++d) {
                identity[summary.od.district_ids[d]] = d;
            }
        }
        summary.aux_counts = aux_from_schedules(
            *summary.schedules, summary.od.n(), zone_district ? *zone_district : identity);
    }
    return summary;
}

void write_summary_dir(const std::string& dir, const SimulationSummary& summary) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    write_od_csv((fs::path(dir) / "od.csv").string(), summary.od);
    write_modes_csv((fs::path(dir) / "modes.csv").string(), summary.modes);
    write_workers_csv((fs::path(dir) / "workers.csv").string(), summary.workers);
    if (summary.schedules) {
        write_schedules_csv((fs::path(dir) / "schedules.csv").string(), *summary.schedules);
    }
}

} // namespace abmcalib
