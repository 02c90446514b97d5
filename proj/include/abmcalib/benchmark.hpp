#pragma once

#include "abmcalib/param_space.hpp"

#include <string>

namespace abmcalib {

enum class BenchmarkFunction { Sphere, Rosenbrock, Rastrigin };

/// Analytic test problems used to validate the optimization loop without
/// a simulator in the way.
struct BenchmarkProblem {
    BenchmarkFunction function = BenchmarkFunction::Sphere;
    std::size_t dimension = 5;
    double lower = 0.0;
    double upper = 0.0;

    /// Classic box bounds when lower/upper are not given explicitly:
    /// sphere and rastrigin [-5.12, 5.12], rosenbrock [-2.048, 2.048].
    static BenchmarkProblem make(const std::string& name, std::size_t dimension);
    static BenchmarkProblem make(const std::string& name, std::size_t dimension, double lower,
                                 double upper);

    /// The known global minimum location (all zeros; all ones for rosenbrock,
    /// clamped into the box). Minimum value is 0 for all three functions.
    ParameterVector global_minimum() const;

    ParameterSpace space() const;
    const char* name() const;
};

double benchmark_cost(const BenchmarkProblem& problem, const ParameterVector& theta);

} // namespace abmcalib
