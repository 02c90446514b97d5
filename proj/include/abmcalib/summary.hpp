#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace abmcalib {

/// Daily origin-destination tour-leg counts between districts; row = origin.
struct ODMatrix {
    std::vector<int> district_ids;
    std::vector<double> counts; // row-major n x n

    ODMatrix() = default;
    explicit ODMatrix(std::vector<int> ids)
        : district_ids(std::move(ids)), counts(district_ids.size() * district_ids.size(), 0.0) {}

    std::size_t n() const { return district_ids.size(); }
    double& at(std::size_t origin, std::size_t dest) { return counts[origin * n() + dest]; }
    double at(std::size_t origin, std::size_t dest) const { return counts[origin * n() + dest]; }

    double total() const;
    double row_sum(std::size_t origin) const;
};

enum class Mode { Public = 0, Car = 1, Walk = 2, Other = 3 };
inline constexpr std::size_t kModeCount = 4;
inline constexpr std::array<const char*, kModeCount> kModeNames{"public", "car", "walk", "other"};

/// Trip shares by mode, ordered (public, car, walk, other), summing to 1.
struct ModeShares {
    std::array<double, kModeCount> shares{};

    static ModeShares uniform() { return {{0.25, 0.25, 0.25, 0.25}}; }
    static ModeShares from_counts(const std::array<double, kModeCount>& counts);

    double operator[](Mode m) const { return shares[static_cast<std::size_t>(m)]; }
};

struct WorkerCoverage {
    long long assigned = 0;
    long long total = 0;
};

enum class TourType { Work = 0, Education = 1, Shop = 2, Other = 3 };
inline constexpr std::array<const char*, 4> kTourTypeNames{"Work", "Education", "Shop", "Other"};

/// One leg of a daily activity schedule.
struct ScheduleRow {
    long long person_id = 0;
    int tour_no = 1;
    TourType tour_type = TourType::Other;
    int stop_no = 1;
    std::string stop_type; // tour type name for the primary stop, "Home" for the return
    int stop_location = 0; // zone id
    Mode stop_mode = Mode::Walk;
    bool primary_stop = false;
    double arrival_time = 0.0;   // decimal hours on the half-hour grid
    double departure_time = 0.0;
    int prev_stop_location = 0;
    double prev_stop_departure_time = 0.0;
};

/// Everything one simulator run reports. aux_counts holds named totals
/// (legs by tour type, per-district anchor arrivals) consumed by the
/// robustness criteria; it is ordered so serialization is reproducible.
struct SimulationSummary {
    ODMatrix od;
    ModeShares modes = ModeShares::uniform();
    WorkerCoverage workers;
    bool zero_trips = false;
    std::optional<std::vector<ScheduleRow>> schedules;
    std::map<std::string, double> aux_counts;

    double aux(const std::string& key) const {
        const auto it = aux_counts.find(key);
        return it == aux_counts.end() ? 0.0 : it->second;
    }
};

/// Rebuilds a district-level OD matrix from schedule legs; zone_district
/// maps zone id -> district index aligned with district_ids.
ODMatrix od_from_schedules(const std::vector<ScheduleRow>& rows,
                           const std::vector<int>& district_ids,
                           const std::map<int, std::size_t>& zone_district);

} // namespace abmcalib
