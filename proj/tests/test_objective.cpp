#include "abmcalib/objective.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace abmcalib;

namespace {

ODMatrix square_od(std::initializer_list<double> values) {
    const auto n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(values.size()))));
    std::vector<int> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(static_cast<int>(i));
    ODMatrix od(ids);
    od.counts.assign(values);
    return od;
}

} // namespace

TEST_CASE("epsilon_od on direct arithmetic cases") {
    const ODMatrix a = square_od({3.0, 1.0, 2.0, 9.0});
    CHECK(epsilon_od(a, a) == 0.0);

    const ODMatrix single_a = square_od({40.0});
    const ODMatrix single_b = square_od({47.0});
    CHECK(epsilon_od(single_a, single_b) == doctest::Approx(0.07).epsilon(1e-12));

    // n = 2, all four entries off by 100: (1/100) * sqrt(40000 / 2)
    const ODMatrix b = square_od({103.0, 101.0, 102.0, 109.0});
    CHECK(epsilon_od(a, b) == doctest::Approx(std::sqrt(20000.0) / 100.0).epsilon(1e-12));
    CHECK(epsilon_od(a, b) == doctest::Approx(1.4142136).epsilon(1e-7));

    CHECK_THROWS_AS(epsilon_od(a, single_a), InputError);
}

TEST_CASE("epsilon_od is invariant under a shared district permutation") {
    const ODMatrix a = square_od({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0});
    const ODMatrix b = square_od({2.0, 1.0, 0.0, 4.0, 4.0, 8.0, 7.5, 8.0, 10.0});
    const double base = epsilon_od(a, b);

    // Apply the permutation (2, 0, 1) to rows and columns of both.
    const std::array<std::size_t, 3> perm{2, 0, 1};
    auto permute = [&](const ODMatrix& m) {
        ODMatrix out = m;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                out.at(i, j) = m.at(perm[i], perm[j]);
            }
        }
        return out;
    };
    CHECK(epsilon_od(permute(a), permute(b)) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("epsilon_mode equals one plus the share distance") {
    const ModeShares equal{{0.25, 0.25, 0.25, 0.25}};
    CHECK(epsilon_mode(equal, equal) == 1.0);

    const ModeShares pt_only{{1.0, 0.0, 0.0, 0.0}};
    const ModeShares car_only{{0.0, 1.0, 0.0, 0.0}};
    CHECK(epsilon_mode(pt_only, car_only) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));

    const ModeShares invalid{{0.5, 0.2, 0.2, 0.2}};
    CHECK_THROWS_AS(epsilon_mode(invalid, equal), InputError);
    CHECK_THROWS_AS(epsilon_mode(equal, invalid), InputError);
}

TEST_CASE("epsilon_mode on the published best-run share rows") {
    // Simulated (PT 0.366, car 0.420, walk 0.200, other 0.014) against the
    // baseline (0.256, 0.488, 0.239, 0.012), baseline renormalized to sum 1.
    const ModeShares sim{{0.366, 0.420, 0.200, 0.014}};
    const std::array<double, 4> baseline_raw{0.256, 0.488, 0.239, 0.012};
    const ModeShares baseline = ModeShares::from_counts(baseline_raw);
    CHECK(epsilon_mode(sim, baseline) == doctest::Approx(1.1356).epsilon(1e-3));
}

TEST_CASE("epsilon_workers spans [1, 2] and decreases with coverage") {
    CHECK(epsilon_workers({1000, 1000}) == 1.0);
    CHECK(epsilon_workers({0, 1000}) == 2.0);
    CHECK(epsilon_workers({750, 1000}) == 1.25);

    double previous = 2.5;
    for (long long assigned = 0; assigned <= 100; assigned += 10) {
        const double value = epsilon_workers({assigned, 100});
        CHECK(value < previous);
        CHECK(value >= 1.0);
        CHECK(value <= 2.0);
        previous = value;
    }

    CHECK_THROWS_AS(epsilon_workers({0, 0}), InputError);
    CHECK_THROWS_AS(epsilon_workers({5, 4}), InputError);
}

TEST_CASE("epsilon_global multiplies the three components") {
    SimulationSummary sim;
    sim.od = square_od({10.0, 0.0, 2.0, 8.0});
    sim.modes = ModeShares{{0.3, 0.4, 0.2, 0.1}};
    sim.workers = {750, 1000};

    SimulationSummary targets = sim;
    const CostBreakdown self = epsilon_global(sim, targets);
    CHECK(self.eps_od == 0.0);
    CHECK(self.eps_mode == 1.0);
    CHECK(self.eps_workers == doctest::Approx(1.25));
    CHECK(self.eps_global == 0.0);

    targets.od = square_od({11.0, 1.0, 1.0, 9.0});
    targets.modes = ModeShares{{0.35, 0.35, 0.2, 0.1}};
    const CostBreakdown cost = epsilon_global(sim, targets);
    CHECK(cost.eps_global == cost.eps_od * cost.eps_mode * cost.eps_workers);
    CHECK(cost.eps_mode >= 1.0);
    CHECK(cost.eps_workers >= 1.0);
    CHECK(cost.eps_workers <= 2.0);
}

TEST_CASE("product arithmetic matches the worked example") {
    CHECK(1.0 * 1.1356 * 1.25 == doctest::Approx(1.4195).epsilon(1e-4));
}

TEST_CASE("eps_global vanishes exactly when OD matrices agree") {
    // The mode and worker factors have floor 1, so a zero product pins the
    // OD component at zero even when the other components differ.
    SimulationSummary sim;
    sim.od = square_od({5.0, 1.0, 1.0, 5.0});
    sim.modes = ModeShares{{0.5, 0.3, 0.1, 0.1}};
    sim.workers = {10, 40};
    SimulationSummary targets;
    targets.od = sim.od;
    targets.modes = ModeShares{{0.25, 0.25, 0.25, 0.25}};
    targets.workers = {40, 40};
    const CostBreakdown cost = epsilon_global(sim, targets);
    CHECK(cost.eps_global == 0.0);
    CHECK(cost.eps_mode > 1.0);

    // And conversely: any OD difference makes the product strictly positive.
    targets.od.at(0, 1) += 0.5;
    CHECK(epsilon_global(sim, targets).eps_global > 0.0);
}
