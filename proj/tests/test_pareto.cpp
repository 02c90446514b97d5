#include "abmcalib/pareto.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace abmcalib;

namespace {

SimulationSummary summary_with_aux() {
    SimulationSummary s;
    s.od = ODMatrix({0, 1});
    s.od.at(0, 0) = 40.0;
    s.od.at(0, 1) = 10.0;
    s.od.at(1, 0) = 10.0;
    s.od.at(1, 1) = 20.0;
    s.modes = ModeShares{{0.4, 0.3, 0.2, 0.1}};
    s.workers = {60, 100};
    s.aux_counts = {
        {"legs_total", 80.0}, {"legs_work", 30.0}, {"legs_education", 20.0},
        {"work_dest_district_0", 10.0}, {"work_dest_district_1", 5.0},
        {"edu_dest_district_0", 6.0}, {"edu_dest_district_1", 4.0},
    };
    return s;
}

std::vector<ParetoEntry> random_entries(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ParetoEntry> entries(n);
    for (std::size_t i = 0; i < n; ++i) {
        entries[i].run_id = 1;
        entries[i].iteration = i + 1;
        entries[i].eps_global = rng.uniform();
        for (auto& c : entries[i].criteria) c = rng.uniform();
    }
    return entries;
}

// Independent O(n^2) oracle over (run_id, iteration) identities.
std::set<std::pair<std::size_t, std::size_t>> brute_force_front(
    const std::vector<ParetoEntry>& entries) {
    std::set<std::pair<std::size_t, std::size_t>> kept;
    for (const auto& a : entries) {
        bool dominated = false;
        for (const auto& b : entries) {
            if (&a == &b) continue;
            bool all_le = true;
            bool one_lt = false;
            for (std::size_t k = 0; k < a.criteria.size(); ++k) {
                if (b.criteria[k] > a.criteria[k]) all_le = false;
                if (b.criteria[k] < a.criteria[k]) one_lt = true;
            }
            if (all_le && one_lt) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.insert({a.run_id, a.iteration});
    }
    return kept;
}

std::set<std::pair<std::size_t, std::size_t>> identities(const ParetoFront& front) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : front.entries) out.insert({e.run_id, e.iteration});
    return out;
}

} // namespace

TEST_CASE("criteria vanish for a perfect match and track each error source") {
    const SimulationSummary target = summary_with_aux();
    const CriterionVector self = compute_criteria(target, target);
    for (double c : self) CHECK(c == 0.0);

    SimulationSummary sim = target;
    sim.modes = ModeShares{{0.42, 0.25, 0.23, 0.10}};
    const CriterionVector shifted = compute_criteria(sim, target);
    CHECK(shifted[0] == doctest::Approx(0.05).epsilon(1e-12)); // max abs share error
    CHECK(shifted[4] == 0.0);

    sim = target;
    sim.workers.assigned = 55;
    CHECK(compute_criteria(sim, target)[3] == 5.0);
}

TEST_CASE("total-legs criterion reproduces the published absolute error") {
    SimulationSummary sim = summary_with_aux();
    SimulationSummary target = summary_with_aux();
    sim.od = ODMatrix({0});
    sim.od.at(0, 0) = 117093.0;
    target.od = ODMatrix({0});
    target.od.at(0, 0) = 112481.0;
    const CriterionVector c = compute_criteria(sim, target);
    CHECK(c[4] == 4612.0);
}

TEST_CASE("criteria need aux counts on both sides") {
    const SimulationSummary with = summary_with_aux();
    SimulationSummary without = with;
    without.aux_counts.clear();
    CHECK_THROWS_AS(compute_criteria(without, with), InputError);
    CHECK_THROWS_AS(compute_criteria(with, without), InputError);
}

TEST_CASE("dominance is strict and antisymmetric") {
    const CriterionVector ones{1, 1, 1, 1, 1, 1};
    const CriterionVector twos{2, 2, 2, 2, 2, 2};
    CHECK(dominates(ones, twos));
    CHECK(!dominates(twos, ones));
    CHECK(!dominates(ones, ones));

    const CriterionVector a{1, 2, 1, 1, 1, 1};
    const CriterionVector b{2, 1, 1, 1, 1, 1};
    CHECK(!dominates(a, b));
    CHECK(!dominates(b, a));
}

TEST_CASE("a single record is its own front") {
    const std::vector<ParetoEntry> one{{1, 5, 0.7, {1, 2, 3, 4, 5, 6}}};
    ParetoConfig config;
    config.thresholds.fill(std::numeric_limits<double>::infinity());
    const ParetoFront front = pareto_front(one, config);
    REQUIRE(front.entries.size() == 1);
    CHECK(front.entries[0].iteration == 5);
    CHECK(!front.empty_feasible_set);
}

TEST_CASE("front equals the brute-force front on random records") {
    const auto entries = random_entries(1000, 314159);
    ParetoConfig config;
    config.thresholds.fill(std::numeric_limits<double>::infinity());
    const ParetoFront front = pareto_front(entries, config);
    CHECK(identities(front) == brute_force_front(entries));

    // Idempotence: the front of the front is itself.
    const ParetoFront again = pareto_front(front.entries, config);
    CHECK(identities(again) == identities(front));

    // Permutation invariance.
    auto shuffled = entries;
    Rng rng(4);
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    }
    CHECK(identities(pareto_front(shuffled, config)) == identities(front));

    // Ordered by objective.
    CHECK(std::is_sorted(front.entries.begin(), front.entries.end(),
                         [](const ParetoEntry& a, const ParetoEntry& b) {
                             return a.eps_global < b.eps_global;
                         }));

    // Every feasible non-front record is dominated by some front record.
    for (const auto& e : entries) {
        if (identities(front).count({e.run_id, e.iteration})) continue;
        bool covered = false;
        for (const auto& f : front.entries) {
            if (dominates(f.criteria, e.criteria)) {
                covered = true;
                break;
            }
        }
        CHECK(covered);
    }
}

TEST_CASE("identical criterion vectors are all retained") {
    std::vector<ParetoEntry> entries{
        {1, 1, 0.5, {1, 1, 1, 1, 1, 1}},
        {1, 2, 0.4, {1, 1, 1, 1, 1, 1}},
        {1, 3, 0.9, {2, 2, 2, 2, 2, 2}},
    };
    ParetoConfig config;
    config.thresholds.fill(std::numeric_limits<double>::infinity());
    const ParetoFront front = pareto_front(entries, config);
    REQUIRE(front.entries.size() == 2);
    CHECK(front.entries[0].iteration == 2); // lower objective first
}

TEST_CASE("feasibility thresholds exclude before dominance") {
    ParetoConfig config; // mode-share threshold defaults to 0.10
    std::vector<ParetoEntry> entries{
        {1, 1, 0.5, {0.15, 0, 0, 0, 0, 0}}, // would dominate, but infeasible
        {1, 2, 0.6, {0.05, 1, 1, 1, 1, 1}},
    };
    const ParetoFront front = pareto_front(entries, config);
    REQUIRE(front.entries.size() == 1);
    CHECK(front.entries[0].iteration == 2);

    // Nothing feasible: empty result plus the warning flag, not an error.
    entries[1].criteria[0] = 0.2;
    const ParetoFront empty = pareto_front(entries, config);
    CHECK(empty.entries.empty());
    CHECK(empty.empty_feasible_set);

    ParetoConfig bad;
    bad.thresholds[2] = 0.0;
    CHECK_THROWS_AS(pareto_front(entries, bad), InputError);
}
