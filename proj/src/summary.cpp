#include "abmcalib/summary.hpp"

#include "abmcalib/errors.hpp"

#include <numeric>

namespace abmcalib {

double ODMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

double ODMatrix::row_sum(std::size_t origin) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < n(); ++j) sum += at(origin, j);
    return sum;
}

ModeShares ModeShares::from_counts(const std::array<double, kModeCount>& counts) {
    double total = 0.0;
    for (double c : counts) {
        if (c < 0.0) {
            throw InputError("mode counts must be non-negative");
        }
        total += c;
    }
    if (total <= 0.0) {
        throw InputError("mode counts are all zero");
    }
    ModeShares shares;
    for (std::size_t i = 0; i < kModeCount; ++i) {
        shares.shares[i] = counts[i] / total;
    }
    return shares;
}

ODMatrix od_from_schedules(const std::vector<ScheduleRow>& rows,
                           const std::vector<int>& district_ids,
                           const std::map<int, std::size_t>& zone_district) {
    ODMatrix od(district_ids);
    for (const auto& row : rows) {
        const auto origin = zone_district.find(row.prev_stop_location);
        const auto dest = zone_district.find(row.stop_location);
        if (origin == zone_district.end() || dest == zone_district.end()) {
            throw InputError("schedule row references a zone with no district mapping");
        }
        od.at(origin->second, dest->second) += 1.0;
    }
    return od;
}

} // namespace abmcalib
