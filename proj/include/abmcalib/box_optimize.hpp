#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace abmcalib {

/// Objective and gradient callbacks for box-constrained minimization.
/// The gradient is whatever the caller supplies; the acquisition module
/// passes wide central finite differences so the optimizer can walk a
/// piecewise-constant forest surface.
using BoxObjective = std::function<double(const std::vector<double>&)>;
using BoxGradient = std::function<std::vector<double>(const std::vector<double>&)>;

struct BoxMinimizeOptions {
    std::size_t max_iterations = 1000;
    std::size_t memory = 10;          // limited-memory curvature pairs
    double pg_tolerance = 1e-9;       // infinity norm of the projected gradient
    double armijo_c1 = 1e-4;
    std::size_t max_backtracks = 30;
};

struct BoxMinimizeResult {
    std::vector<double> x;  // best point seen, inside the box
    double f = 0.0;         // objective there
    std::size_t iterations = 0;
};

/// Limited-memory quasi-Newton descent with projection onto the box and an
/// active-set mask for coordinates pinned at a bound. Returns the best
/// point visited, which is never worse than the start point.
BoxMinimizeResult lbfgsb_minimize(const BoxObjective& f, const BoxGradient& grad,
                                  const std::vector<double>& x0,
                                  const std::vector<double>& lower,
                                  const std::vector<double>& upper,
                                  const BoxMinimizeOptions& options = {});

/// Plain projected gradient descent with the same line search; a reference
/// method the quasi-Newton routine is checked against.
BoxMinimizeResult projected_gradient_minimize(const BoxObjective& f, const BoxGradient& grad,
                                              const std::vector<double>& x0,
                                              const std::vector<double>& lower,
                                              const std::vector<double>& upper,
                                              const BoxMinimizeOptions& options = {});

} // namespace abmcalib
