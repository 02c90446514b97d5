#include "abmcalib/acquisition.hpp"

#include "abmcalib/box_optimize.hpp"
#include "abmcalib/errors.hpp"
#include "abmcalib/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace abmcalib {

namespace {

constexpr double kEiFloor = 1e-12;
constexpr double kDuplicateLinf = 1e-9;

bool is_duplicate(const UnitVector& candidate, const std::vector<UnitVector>& seen) {
    for (const auto& p : seen) {
        if (p.size() != candidate.size()) continue;
        double linf = 0.0;
        for (std::size_t i = 0; i < candidate.size(); ++i) {
            linf = std::max(linf, std::abs(p[i] - candidate[i]));
        }
        if (linf <= kDuplicateLinf) return true;
    }
    return false;
}

UnitVector uniform_point(Rng& rng, std::size_t d) {
    UnitVector u;
    u.values.resize(d);
    for (auto& v : u.values) v = rng.uniform();
    return u;
}

} // namespace

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

double expected_improvement(double mean, double std, double f_best) {
    if (std < 0.0) {
        throw InputError("expected_improvement: negative standard deviation");
    }
    if (std == 0.0) {
        return 0.0;
    }
    const double z = (f_best - mean) / std;
    const double ei = std * (z * normal_cdf(z) + normal_pdf(z));
    return std::max(ei, 0.0);
}

AcquisitionResult optimize_acquisition(const AcquisitionContext& ctx,
                                       const AcquisitionOptions& options, std::uint64_t seed) {
    if (ctx.forest == nullptr || !ctx.forest->trained()) {
        throw StateError("optimize_acquisition: forest has not been fitted");
    }
    if (options.n_starts < 1) {
        throw InputError("optimize_acquisition: at least one start required");
    }
    const RandomForest& forest = *ctx.forest;
    const std::size_t d = forest.dimension();
    const double f_best = ctx.incumbent_value;

    auto ei_at = [&](const UnitVector& u) {
        const SurrogatePrediction p = forest.predict(u);
        return expected_improvement(p.mean, p.std, f_best);
    };

    const BoxObjective neg_ei = [&](const std::vector<double>& x) {
        const SurrogatePrediction p = forest.predict(UnitVector{x});
        return -expected_improvement(p.mean, p.std, f_best);
    };
    // Central differences with a step wide enough to reach across tree
    // splits; the divided difference uses the clamped probe separation.
    const BoxGradient fd_grad = [&](const std::vector<double>& x) {
        std::vector<double> g(x.size());
        std::vector<double> probe = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double hi = std::min(x[i] + options.fd_step, 1.0);
            const double lo = std::max(x[i] - options.fd_step, 0.0);
            probe[i] = hi;
            const double f_hi = neg_ei(probe);
            probe[i] = lo;
            const double f_lo = neg_ei(probe);
            probe[i] = x[i];
            g[i] = (f_hi - f_lo) / (hi - lo);
        }
        return g;
    };

    Rng rng(derive_seed(seed, {0xacc1u}));
    std::vector<UnitVector> starts;
    starts.reserve(options.n_starts + 1);
    for (std::size_t s = 0; s < options.n_starts; ++s) {
        starts.push_back(uniform_point(rng, d));
    }
    if (ctx.incumbent_point && ctx.incumbent_point->size() == d) {
        starts.push_back(*ctx.incumbent_point);
    }

    const std::vector<double> lower(d, 0.0);
    const std::vector<double> upper(d, 1.0);
    BoxMinimizeOptions box_options;
    box_options.max_iterations = options.max_iterations;
    box_options.memory = options.memory;

    AcquisitionResult result;
    result.n_starts_used = starts.size();

    // Candidates ranked by (EI, start index). A stale surrogate between
    // retrains can pin the argmax onto an already-evaluated point; the best
    // start result that is NOT a repeat wins, so those iterations still
    // sample inside the top plateaus instead of degrading to random draws.
    std::vector<std::pair<double, UnitVector>> candidates;
    candidates.reserve(starts.size());
    for (const auto& start : starts) {
        const BoxMinimizeResult run =
            options.projected_gradient_only
                ? projected_gradient_minimize(neg_ei, fd_grad, start.values, lower, upper,
                                              box_options)
                : lbfgsb_minimize(neg_ei, fd_grad, start.values, lower, upper, box_options);
        candidates.emplace_back(-run.f, UnitVector{run.x});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    bool found = false;
    for (const auto& [ei, point] : candidates) {
        if (ei <= kEiFloor) break;
        if (ctx.evaluated_points != nullptr && is_duplicate(point, *ctx.evaluated_points)) {
            continue;
        }
        result.point = point;
        result.ei_value = ei;
        found = true;
        break;
    }

    if (!found) {
        UnitVector fresh = uniform_point(rng, d);
        if (ctx.evaluated_points != nullptr) {
            for (int attempt = 0; attempt < 1000 && is_duplicate(fresh, *ctx.evaluated_points);
                 ++attempt) {
                fresh = uniform_point(rng, d);
            }
        }
        result.point = std::move(fresh);
        result.ei_value = ei_at(result.point);
        result.fallback_used = true;
    }
    return result;
}

} // namespace abmcalib
