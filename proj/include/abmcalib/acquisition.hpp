#pragma once

#include "abmcalib/param_space.hpp"
#include "abmcalib/surrogate_rf.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace abmcalib {

double normal_pdf(double z);
double normal_cdf(double z);

/// Expected improvement of a normal prediction (mean, std) over the
/// incumbent f_best, for minimization: sigma * (z * cdf(z) + pdf(z)) with
/// z = (f_best - mean) / sigma. Exactly 0 when sigma is 0.
double expected_improvement(double mean, double std, double f_best);

struct AcquisitionContext {
    const RandomForest* forest = nullptr;
    double incumbent_value = 0.0;                 // best discrepancy so far
    std::optional<UnitVector> incumbent_point;    // extra optimization start
    const std::vector<UnitVector>* evaluated_points = nullptr; // duplicate suppression
};

struct AcquisitionOptions {
    std::size_t n_starts = 10;          // uniform random starts
    std::size_t max_iterations = 1000;  // per start
    double fd_step = 0.5;               // central-difference step in unit coords
    std::size_t memory = 10;
    bool projected_gradient_only = false; // reference optimizer, for checks
};

struct AcquisitionResult {
    UnitVector point;
    double ei_value = 0.0;
    std::size_t n_starts_used = 0;
    bool fallback_used = false;
};

/// Maximizes expected improvement over [0,1]^d by running the box-constrained
/// quasi-Newton routine on -EI from each start (seeded uniform draws plus the
/// incumbent point when provided), with central finite-difference gradients
/// wide enough to bridge the plateaus of the forest surface. Falls back to a
/// fresh uniform point when the best EI is indistinguishable from zero or the
/// winner duplicates an already-evaluated point.
AcquisitionResult optimize_acquisition(const AcquisitionContext& ctx,
                                       const AcquisitionOptions& options, std::uint64_t seed);

inline AcquisitionResult optimize_acquisition(const AcquisitionContext& ctx,
                                              std::size_t n_starts, std::uint64_t seed) {
    AcquisitionOptions options;
    options.n_starts = n_starts;
    return optimize_acquisition(ctx, options, seed);
}

} // namespace abmcalib
