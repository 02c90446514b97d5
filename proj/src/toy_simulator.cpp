#include "abmcalib/toy_simulator.hpp"

#include "abmcalib/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace abmcalib {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kDayStart = 3.25;
constexpr double kDayEnd = 26.75;
// Inclusive-value coefficient linking the mode nest to the day-pattern
// level; structural, not calibrated.
constexpr double kLogsumCoefficient = 0.7;

// Half-hour grid windows per tour type: earliest/latest arrival slot and
// shortest/longest activity duration, all in 0.5 h steps.
struct TimeWindow {
    double arrival_min;
    double arrival_max;
    double duration_min;
    double duration_max;
};

constexpr std::array<TimeWindow, 4> kTimeWindows{{
    {7.25, 9.75, 7.0, 9.5},   // Work
    {7.75, 9.25, 5.0, 7.0},   // Education
    {9.75, 19.75, 0.5, 2.0},  // Shop
    {9.75, 20.25, 0.5, 3.0},  // Other
}};

double grid_draw(Rng& rng, double lo, double hi) {
    const auto slots = static_cast<std::uint64_t>(std::lround((hi - lo) / 0.5)) + 1;
    return lo + 0.5 * static_cast<double>(rng.below(slots));
}

// Resolved positions of the 24 behavioral parameters inside a theta vector.
struct BetaIndex {
    // day pattern
    std::size_t female_travel, age[4], income, cars, employed;
    // mode choice
    std::size_t const_pt, const_car, const_other;
    std::size_t tt_pt, tt_car, tt_walk, tt_other;
    std::size_t cost_pt, cost_car, costinc_pt, costinc_car, cars_car;
    // destination choice
    std::size_t dest_tt, dest_cost, dest_size, dest_intrazonal;
};

BetaIndex resolve_betas(const ParameterSpace& space) {
    const auto& names = ToyScenario::beta_names();
    for (const auto& name : names) {
        if (!space.contains(name)) {
            throw InputError("toy_simulate: parameter space is missing beta '" + name + "'");
        }
    }
    auto at = [&](const char* name) { return space.index_of(name); };
    BetaIndex b{};
    b.female_travel = at("dp_female_travel");
    b.age[0] = at("dp_age_1");
    b.age[1] = at("dp_age_2");
    b.age[2] = at("dp_age_3");
    b.age[3] = at("dp_age_4");
    b.income = at("dp_income");
    b.cars = at("dp_cars");
    b.employed = at("dp_employed");
    b.const_pt = at("mode_const_pt");
    b.const_car = at("mode_const_car");
    b.const_other = at("mode_const_other");
    b.tt_pt = at("mode_tt_pt");
    b.tt_car = at("mode_tt_car");
    b.tt_walk = at("mode_tt_walk");
    b.tt_other = at("mode_tt_other");
    b.cost_pt = at("mode_cost_pt");
    b.cost_car = at("mode_cost_car");
    b.costinc_pt = at("mode_costinc_pt");
    b.costinc_car = at("mode_costinc_car");
    b.cars_car = at("mode_cars_car");
    b.dest_tt = at("dest_tt");
    b.dest_cost = at("dest_cost");
    b.dest_size = at("dest_size");
    b.dest_intrazonal = at("dest_intrazonal");
    return b;
}

std::array<double, kModeCount> mode_utilities(const ToyScenario& sc, const Agent& agent,
                                              int destination, const ParameterVector& th,
                                              const BetaIndex& b) {
    const double income_floor = std::max(agent.income, 1.0);
    const int home = agent.home_zone;
    const double tt_pt = sc.travel_time(home, destination, Mode::Public);
    const double tt_car = sc.travel_time(home, destination, Mode::Car);
    const double tt_walk = sc.travel_time(home, destination, Mode::Walk);
    const double tt_other = sc.travel_time(home, destination, Mode::Other);
    const double cost_pt = sc.travel_cost(home, destination, Mode::Public);
    const double cost_car = sc.travel_cost(home, destination, Mode::Car);

    std::array<double, kModeCount> u{};
    u[static_cast<std::size_t>(Mode::Public)] = th[b.const_pt] + th[b.tt_pt] * tt_pt +
                                                th[b.cost_pt] * cost_pt +
                                                th[b.costinc_pt] * cost_pt / income_floor;
    if (agent.cars_in_household >= 1) {
        u[static_cast<std::size_t>(Mode::Car)] =
            th[b.const_car] + th[b.tt_car] * tt_car + th[b.cost_car] * cost_car +
            th[b.costinc_car] * cost_car / income_floor +
            th[b.cars_car] * agent.cars_in_household;
    } else {
        u[static_cast<std::size_t>(Mode::Car)] = kNegInf;
    }
    u[static_cast<std::size_t>(Mode::Walk)] = th[b.tt_walk] * tt_walk; // reference mode
    u[static_cast<std::size_t>(Mode::Other)] = th[b.const_other] + th[b.tt_other] * tt_other;
    return u;
}

double logsum(std::span<const double> utilities) {
    double peak = kNegInf;
    for (double u : utilities) peak = std::max(peak, u);
    double sum = 0.0;
    for (double u : utilities) {
        if (u != kNegInf) sum += std::exp(u - peak);
    }
    return peak + std::log(sum);
}

} // namespace

ToyScenario ToyScenario::build(const Options& options) {
    if (options.n_zones == 0 || options.n_districts == 0 ||
        options.n_zones % options.n_districts != 0) {
        throw InputError("toy scenario: zone count must be a positive multiple of district count");
    }
    if (options.n_agents == 0) {
        throw InputError("toy scenario: agent count must be positive");
    }

    ToyScenario sc;
    sc.n_zones_ = options.n_zones;
    sc.n_districts_ = options.n_districts;

    const std::size_t per_district = options.n_zones / options.n_districts;
    sc.zone_district_.resize(options.n_zones);
    for (std::size_t z = 0; z < options.n_zones; ++z) {
        sc.zone_district_[z] = static_cast<int>(z / per_district);
    }

    // Zones on a square grid; per-mode time and cost grow with distance.
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(options.n_zones))));
    auto zone_xy = [side](std::size_t z) {
        return std::pair<double, double>{static_cast<double>(z % side), static_cast<double>(z / side)};
    };
    const double cx = (static_cast<double>(side) - 1.0) / 2.0;
    const double cy = cx;

    sc.times_.resize(options.n_zones * options.n_zones * kModeCount);
    sc.costs_.resize(sc.times_.size());
    for (std::size_t from = 0; from < options.n_zones; ++from) {
        const auto [fx, fy] = zone_xy(from);
        for (std::size_t to = 0; to < options.n_zones; ++to) {
            const auto [tx, ty] = zone_xy(to);
            const double dist = std::hypot(fx - tx, fy - ty);
            const std::size_t base = (from * options.n_zones + to) * kModeCount;
            sc.times_[base + static_cast<std::size_t>(Mode::Public)] = 10.0 + 9.0 * dist;
            sc.times_[base + static_cast<std::size_t>(Mode::Car)] = 5.0 + 6.0 * dist;
            sc.times_[base + static_cast<std::size_t>(Mode::Walk)] = 5.0 + 15.0 * dist;
            sc.times_[base + static_cast<std::size_t>(Mode::Other)] = 8.0 + 7.0 * dist;
            sc.costs_[base + static_cast<std::size_t>(Mode::Public)] = 1.5;
            sc.costs_[base + static_cast<std::size_t>(Mode::Car)] = 0.5 + 0.8 * dist;
            sc.costs_[base + static_cast<std::size_t>(Mode::Walk)] = 0.0;
            sc.costs_[base + static_cast<std::size_t>(Mode::Other)] = 0.3 + 0.4 * dist;
        }
    }

    // Central zones attract more mandatory and discretionary activity.
    sc.attraction_.resize(options.n_zones);
    std::vector<double> anchor_weight(options.n_zones);
    for (std::size_t z = 0; z < options.n_zones; ++z) {
        const auto [x, y] = zone_xy(z);
        const double centrality = 1.0 + 4.0 / (1.0 + std::hypot(x - cx, y - cy));
        anchor_weight[z] = centrality;
        sc.attraction_[z] = std::log(centrality);
    }

    auto weighted_zone = [&](Rng& rng, const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double draw = rng.uniform() * total;
        for (std::size_t z = 0; z < weights.size(); ++z) {
            draw -= weights[z];
            if (draw < 0.0) return static_cast<int>(z);
        }
        return static_cast<int>(weights.size() - 1);
    };

    std::vector<double> home_weight(options.n_zones);
    for (std::size_t z = 0; z < options.n_zones; ++z) {
        home_weight[z] = 1.0 + static_cast<double>(z % 4);
    }

    constexpr std::array<double, 5> kAgeWeights{0.18, 0.22, 0.25, 0.20, 0.15};
    constexpr std::array<double, 5> kEmployedByAge{0.05, 0.65, 0.80, 0.70, 0.10};
    constexpr std::array<double, 5> kStudentByAge{0.85, 0.25, 0.02, 0.02, 0.02};

    Rng rng(derive_seed(options.seed, {0x70e0u}));
    sc.agents_.resize(options.n_agents);
    for (std::size_t i = 0; i < options.n_agents; ++i) {
        Agent& a = sc.agents_[i];
        a.id = static_cast<long long>(i);
        a.female = rng.uniform() < 0.51;

        double age_draw = rng.uniform();
        a.age_category = 4;
        for (int cat = 0; cat < 5; ++cat) {
            age_draw -= kAgeWeights[static_cast<std::size_t>(cat)];
            if (age_draw < 0.0) {
                a.age_category = cat;
                break;
            }
        }

        a.employed = rng.uniform() < kEmployedByAge[static_cast<std::size_t>(a.age_category)];
        a.student = rng.uniform() < kStudentByAge[static_cast<std::size_t>(a.age_category)];
        a.income = a.employed ? 2.0 + 3.0 * std::pow(rng.uniform(), 1.5)
                              : 0.5 + 1.5 * rng.uniform();

        const double cars_draw = rng.uniform();
        a.cars_in_household = cars_draw < 0.30 ? 0 : (cars_draw < 0.80 ? 1 : 2);

        a.home_zone = weighted_zone(rng, home_weight);
        if (a.employed) a.work_zone = weighted_zone(rng, anchor_weight);
        if (a.student) a.school_zone = weighted_zone(rng, anchor_weight);
    }
    return sc;
}

std::vector<int> ToyScenario::district_ids() const {
    std::vector<int> ids(n_districts_);
    for (std::size_t d = 0; d < n_districts_; ++d) ids[d] = static_cast<int>(d);
    return ids;
}

std::map<int, std::size_t> ToyScenario::zone_district_map() const {
    std::map<int, std::size_t> map;
    for (std::size_t z = 0; z < n_zones_; ++z) {
        map[static_cast<int>(z)] = static_cast<std::size_t>(zone_district_[z]);
    }
    return map;
}

const std::vector<std::string>& ToyScenario::beta_names() {
    static const std::vector<std::string> names{
        "dp_female_travel", "dp_age_1", "dp_age_2", "dp_age_3", "dp_age_4",
        "dp_income", "dp_cars", "dp_employed",
        "mode_const_pt", "mode_const_car", "mode_const_other",
        "mode_tt_pt", "mode_tt_car", "mode_tt_walk", "mode_tt_other",
        "mode_cost_pt", "mode_cost_car", "mode_costinc_pt", "mode_costinc_car",
        "mode_cars_car",
        "dest_tt", "dest_cost", "dest_size", "dest_intrazonal"};
    return names;
}

ParameterVector ToyScenario::documented_theta_star() {
    return ParameterVector{{
        0.05, 0.08, 0.06, 0.03, -0.08, 0.01, 0.04, 1.5,        // day pattern
        0.9, 1.4, -0.6,                                         // mode constants
        -0.031, -0.0305, -0.0315, -0.031,                       // mode time
        -0.02, -0.025, -0.02, -0.015, 0.04,                     // mode cost and cars
        -0.16, -0.02, 0.9, 0.5,                                 // destination
    }};
}

ParameterSpace ToyScenario::default_space() {
    // The example space mirrors a pre-adjusted model: a handful of
    // policy-critical coefficients (day-pattern level, the two dominant
    // mode constants, destination shape) are left wide open for the
    // calibration to resolve, while the remaining weights carry tight
    // prior-informed boxes around their manually set starting values.
    std::vector<ParameterSpec> specs;
    for (const std::string& name : beta_names()) {
        ParameterSpec spec;
        spec.name = name;
        if (name == "dp_employed") {
            spec.initial = 0.8;
            spec.lower = -0.5;
            spec.upper = 2.5;
        } else if (name == "mode_const_pt" || name == "mode_const_car") {
            spec.lower = -3.0;
            spec.upper = 3.0;
        } else if (name == "mode_const_other") {
            spec.lower = -1.2;
            spec.upper = 0.4;
        } else if (name == "dest_tt") {
            spec.initial = -0.03;
            spec.lower = -0.5;
            spec.upper = 0.15;
        } else if (name == "dest_size" || name == "dest_intrazonal") {
            spec.lower = -2.5;
            spec.upper = 2.5;
        } else if (name.rfind("mode_tt_", 0) == 0) {
            // Estimated upstream; the residual box is a +-0.15 utility
            // band over the longest trips, not a free coefficient.
            spec.initial = -0.03;
            spec.lower = -0.033;
            spec.upper = -0.028;
        } else if (name.rfind("mode_cost_", 0) == 0 || name == "dest_cost") {
            spec.lower = -0.04;
            spec.upper = 0.01;
        } else if (name.rfind("mode_costinc_", 0) == 0) {
            spec.lower = -0.04;
            spec.upper = 0.01;
        } else if (name == "mode_cars_car") {
            spec.lower = -0.02;
            spec.upper = 0.08;
        } else if (name == "dp_income") {
            spec.lower = -0.015;
            spec.upper = 0.025;
        } else if (name == "dp_female_travel" || name == "dp_cars") {
            spec.lower = -0.08;
            spec.upper = 0.12;
        } else {
            spec.lower = -0.12; // age-category day-pattern offsets
            spec.upper = 0.12;
        }
        specs.push_back(spec);
    }
    return ParameterSpace(std::move(specs));
}

ParameterSpace ToyScenario::stress_space(std::size_t dimension) {
    const auto& base = beta_names();
    if (dimension < base.size()) {
        throw InputError("stress space dimension must be at least " + std::to_string(base.size()));
    }
    std::vector<std::string> names = base;
    names.reserve(dimension);
    for (std::size_t i = base.size(); i < dimension; ++i) {
        std::string padded = std::to_string(i);
        while (padded.size() < 3) padded.insert(padded.begin(), '0');
        names.push_back("pad_" + padded);
    }
    return ParameterSpace::around_initials(names, std::vector<double>(dimension, 0.0));
}

std::size_t logit_choice(std::span<const double> utilities, Rng& rng) {
    if (utilities.empty()) {
        throw InputError("logit_choice: no alternatives");
    }
    double peak = kNegInf;
    for (double u : utilities) {
        peak = std::max(peak, u);
    }
    if (peak == kNegInf) {
        throw InputError("logit_choice: all alternatives have -inf utility");
    }
    double total = 0.0;
    for (double u : utilities) {
        if (u != kNegInf) total += std::exp(u - peak);
    }
    double draw = rng.uniform() * total;
    std::size_t last_finite = 0;
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        if (utilities[i] == kNegInf) continue;
        last_finite = i;
        draw -= std::exp(utilities[i] - peak);
        if (draw < 0.0) return i;
    }
    return last_finite;
}

SimulationSummary toy_simulate(const ToyScenario& scenario, const ParameterSpace& space,
                               const ParameterVector& theta, std::uint64_t seed) {
    if (theta.size() != space.dimension()) {
        throw InputError("toy_simulate: theta dimension does not match the parameter space");
    }
    const BetaIndex b = resolve_betas(space);

    SimulationSummary summary;
    summary.od = ODMatrix(scenario.district_ids());
    std::array<double, kModeCount> mode_leg_counts{};
    std::vector<ScheduleRow> rows;
    rows.reserve(scenario.agents().size() * 2);

    const std::size_t n_districts = scenario.n_districts();
    std::vector<double> work_dest(n_districts, 0.0);
    std::vector<double> edu_dest(n_districts, 0.0);
    std::array<double, 4> legs_by_tour_type{};

    long long employed_total = 0;
    long long employed_with_work_tour = 0;

    std::vector<double> dest_utilities(scenario.n_zones());
    for (const Agent& agent : scenario.agents()) {
        if (agent.employed) ++employed_total;

        Rng rng(derive_seed(seed, {0xa6e27u, static_cast<std::uint64_t>(agent.id)}));

        // Tour type and destination offer. Mandatory anchors win; otherwise
        // a discretionary tour with a logit-sampled destination.
        TourType tour_type;
        int anchor = -1;
        if (agent.employed) {
            tour_type = TourType::Work;
            anchor = agent.work_zone;
        } else if (agent.student) {
            tour_type = TourType::Education;
            anchor = agent.school_zone;
        } else {
            tour_type = rng.uniform() < 0.5 ? TourType::Shop : TourType::Other;
        }

        int logsum_destination = anchor;
        if (anchor < 0) {
            for (std::size_t z = 0; z < scenario.n_zones(); ++z) {
                const int zone = static_cast<int>(z);
                dest_utilities[z] =
                    theta[b.dest_tt] * scenario.travel_time(agent.home_zone, zone, Mode::Car) +
                    theta[b.dest_cost] * scenario.travel_cost(agent.home_zone, zone, Mode::Car) +
                    theta[b.dest_size] * scenario.attraction(zone) +
                    (zone == agent.home_zone ? theta[b.dest_intrazonal] : 0.0);
            }
            const auto best = std::max_element(dest_utilities.begin(), dest_utilities.end());
            logsum_destination = static_cast<int>(best - dest_utilities.begin());
        }

        // Day-pattern binary choice; the stay alternative is normalized to 0.
        const auto offer_modes = mode_utilities(scenario, agent, logsum_destination, theta, b);
        const double mode_logsum = logsum(offer_modes);
        double u_travel = theta[b.female_travel] * (agent.female ? 1.0 : 0.0) +
                          theta[b.income] * agent.income +
                          theta[b.cars] * agent.cars_in_household +
                          theta[b.employed] * (agent.employed ? 1.0 : 0.0) +
                          kLogsumCoefficient * mode_logsum;
        if (agent.age_category > 0) {
            u_travel += theta[b.age[agent.age_category - 1]];
        }
        const std::array<double, 2> day_pattern{u_travel, 0.0};
        if (logit_choice(day_pattern, rng) == 1) {
            continue; // stays home
        }

        int destination = anchor;
        if (anchor < 0) {
            destination = static_cast<int>(logit_choice(dest_utilities, rng));
        }
        const auto modes = destination == logsum_destination
                               ? offer_modes
                               : mode_utilities(scenario, agent, destination, theta, b);
        const Mode mode = static_cast<Mode>(logit_choice(modes, rng));

        const TimeWindow& window = kTimeWindows[static_cast<std::size_t>(tour_type)];
        const double arrival = grid_draw(rng, window.arrival_min, window.arrival_max);
        const double departure =
            std::min(arrival + grid_draw(rng, window.duration_min, window.duration_max), kDayEnd);

        ScheduleRow primary;
        primary.person_id = agent.id;
        primary.tour_no = 1;
        primary.tour_type = tour_type;
        primary.stop_no = 1;
        primary.stop_type = kTourTypeNames[static_cast<std::size_t>(tour_type)];
        primary.stop_location = destination;
        primary.stop_mode = mode;
        primary.primary_stop = true;
        primary.arrival_time = arrival;
        primary.departure_time = departure;
        primary.prev_stop_location = agent.home_zone;
        primary.prev_stop_departure_time = arrival;

        ScheduleRow back_home;
        back_home.person_id = agent.id;
        back_home.tour_no = 1;
        back_home.tour_type = tour_type;
        back_home.stop_no = 2;
        back_home.stop_type = "Home";
        back_home.stop_location = agent.home_zone;
        back_home.stop_mode = mode;
        back_home.primary_stop = false;
        back_home.arrival_time = departure;
        back_home.departure_time = kDayEnd;
        back_home.prev_stop_location = destination;
        back_home.prev_stop_departure_time = departure;

        rows.push_back(std::move(primary));
        rows.push_back(std::move(back_home));

        const auto home_district = static_cast<std::size_t>(scenario.district_of(agent.home_zone));
        const auto dest_district = static_cast<std::size_t>(scenario.district_of(destination));
        summary.od.at(home_district, dest_district) += 1.0;
        summary.od.at(dest_district, home_district) += 1.0;
        mode_leg_counts[static_cast<std::size_t>(mode)] += 2.0;
        legs_by_tour_type[static_cast<std::size_t>(tour_type)] += 2.0;

        if (tour_type == TourType::Work) {
            work_dest[dest_district] += 1.0;
            if (agent.employed) ++employed_with_work_tour;
        } else if (tour_type == TourType::Education) {
            edu_dest[dest_district] += 1.0;
        }
    }

    summary.workers = {employed_with_work_tour, std::max<long long>(employed_total, 1)};

    const double total_legs = summary.od.total();
    if (total_legs > 0.0) {
        std::array<double, kModeCount> counts{};
        for (std::size_t m = 0; m < kModeCount; ++m) counts[m] = mode_leg_counts[m];
        summary.modes = ModeShares::from_counts(counts);
    } else {
        summary.modes = ModeShares::uniform();
        summary.zero_trips = true;
    }

    summary.aux_counts["legs_total"] = total_legs;
    summary.aux_counts["legs_work"] = legs_by_tour_type[static_cast<std::size_t>(TourType::Work)];
    summary.aux_counts["legs_education"] =
        legs_by_tour_type[static_cast<std::size_t>(TourType::Education)];
    summary.aux_counts["legs_shop"] = legs_by_tour_type[static_cast<std::size_t>(TourType::Shop)];
    summary.aux_counts["legs_other"] = legs_by_tour_type[static_cast<std::size_t>(TourType::Other)];
    for (std::size_t d = 0; d < n_districts; ++d) {
        summary.aux_counts["work_dest_district_" + std::to_string(d)] = work_dest[d];
        summary.aux_counts["edu_dest_district_" + std::to_string(d)] = edu_dest[d];
    }

    summary.schedules = std::move(rows);
    return summary;
}

} // namespace abmcalib
