#pragma once

#include "abmcalib/param_space.hpp"
#include "abmcalib/rng.hpp"
#include "abmcalib/summary.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace abmcalib {

/// One synthetic traveler.
struct Agent {
    long long id = 0;
    bool employed = false;
    bool student = false;
    bool female = false;
    int age_category = 0;     // 0..4
    double income = 0.0;      // tens of thousands per year
    int cars_in_household = 0;
    int home_zone = 0;
    int work_zone = -1;   // present iff employed
    int school_zone = -1; // present iff student
};

/// Synthetic city: a square grid of zones grouped into districts, with
/// per-mode travel time and cost between all zone pairs, and the agent
/// population. Everything is a deterministic function of the build inputs.
class ToyScenario {
public:
    struct Options {
        std::size_t n_agents = 5000;
        std::size_t n_zones = 16;
        std::size_t n_districts = 4;
        std::uint64_t seed = 7;
    };

    static ToyScenario build(const Options& options);

    const std::vector<Agent>& agents() const { return agents_; }
    std::size_t n_zones() const { return n_zones_; }
    std::size_t n_districts() const { return n_districts_; }
    int district_of(int zone) const { return zone_district_[static_cast<std::size_t>(zone)]; }
    std::vector<int> district_ids() const;
    std::map<int, std::size_t> zone_district_map() const;

    double travel_time(int from, int to, Mode mode) const {
        return times_[index(from, to, mode)];
    }
    double travel_cost(int from, int to, Mode mode) const {
        return costs_[index(from, to, mode)];
    }
    /// Log of destination attractiveness, fixed by the zone geometry.
    double attraction(int zone) const { return attraction_[static_cast<std::size_t>(zone)]; }

    /// Names of the behavioral parameters the utilities consume, in the
    /// canonical layout order: 8 day-pattern, 12 mode, 4 destination.
    static const std::vector<std::string>& beta_names();

    /// Ground-truth parameter values used for generated example targets.
    static ParameterVector documented_theta_star();

    /// The 24-parameter space the example configuration ships with:
    /// default boxes around mostly-zero starting values.
    static ParameterSpace default_space();

    /// Wide layout for dimensional stress tests: the 24 live parameters
    /// followed by inert padding axes up to the requested dimension.
    static ParameterSpace stress_space(std::size_t dimension);

private:
    std::size_t index(int from, int to, Mode mode) const {
        return (static_cast<std::size_t>(from) * n_zones_ + static_cast<std::size_t>(to)) *
                   kModeCount +
               static_cast<std::size_t>(mode);
    }

    std::size_t n_zones_ = 0;
    std::size_t n_districts_ = 0;
    std::vector<Agent> agents_;
    std::vector<int> zone_district_;
    std::vector<double> times_;
    std::vector<double> costs_;
    std::vector<double> attraction_;
};

/// Samples index i with probability exp(u_i) / sum_j exp(u_j), computed
/// with a max shift. A -inf utility gets probability 0; all -inf is an error.
std::size_t logit_choice(std::span<const double> utilities, Rng& rng);

/// Runs the two-level nested-logit day simulation: a binary travel/stay
/// choice fed by the mode-level logsum, then destination and mode choice
/// and half-hour-grid activity times for travelers. Aggregates schedules,
/// the district OD matrix, mode shares, worker coverage and the named
/// totals used by the robustness criteria. Deterministic in (scenario,
/// theta, seed); each agent consumes a stream derived from (seed, agent id).
/// The space must contain every name in ToyScenario::beta_names(); extra
/// parameters (stress layouts) are ignored.
SimulationSummary toy_simulate(const ToyScenario& scenario, const ParameterSpace& space,
                               const ParameterVector& theta, std::uint64_t seed);

} // namespace abmcalib
