#include "abmcalib/benchmark.hpp"

#include "abmcalib/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace abmcalib {

BenchmarkProblem BenchmarkProblem::make(const std::string& name, std::size_t dimension) {
    if (name == "rosenbrock") return make(name, dimension, -2.048, 2.048);
    return make(name, dimension, -5.12, 5.12);
}

BenchmarkProblem BenchmarkProblem::make(const std::string& name, std::size_t dimension,
                                        double lower, double upper) {
    if (dimension == 0) {
        throw InputError("benchmark: dimension must be positive");
    }
    if (!(lower < upper)) {
        throw InputError("benchmark: lower bound must be strictly below upper");
    }
    BenchmarkProblem p;
    if (name == "sphere") {
        p.function = BenchmarkFunction::Sphere;
    } else if (name == "rosenbrock") {
        p.function = BenchmarkFunction::Rosenbrock;
        if (dimension < 2) {
            throw InputError("benchmark: rosenbrock needs dimension >= 2");
        }
    } else if (name == "rastrigin") {
        p.function = BenchmarkFunction::Rastrigin;
    } else {
        throw InputError("benchmark: unknown function '" + name +
                         "' (expected sphere, rosenbrock or rastrigin)");
    }
    p.dimension = dimension;
    p.lower = lower;
    p.upper = upper;
    return p;
}

const char* BenchmarkProblem::name() const {
    switch (function) {
        case BenchmarkFunction::Sphere: return "sphere";
        case BenchmarkFunction::Rosenbrock: return "rosenbrock";
        case BenchmarkFunction::Rastrigin: return "rastrigin";
    }
    return "sphere";
}

ParameterVector BenchmarkProblem::global_minimum() const {
    const double at = function == BenchmarkFunction::Rosenbrock ? 1.0 : 0.0;
    return ParameterVector{std::vector<double>(dimension, std::clamp(at, lower, upper))};
}

ParameterSpace BenchmarkProblem::space() const {
    return ParameterSpace::uniform_box(dimension, lower, upper);
}

double benchmark_cost(const BenchmarkProblem& problem, const ParameterVector& theta) {
    if (theta.size() != problem.dimension) {
        throw InputError("benchmark_cost: dimension mismatch");
    }
    for (double v : theta.values) {
        if (v < problem.lower || v > problem.upper) {
            throw InputError("benchmark_cost: point outside problem bounds");
        }
    }
    const auto& x = theta.values;
    switch (problem.function) {
        case BenchmarkFunction::Sphere: {
            double sum = 0.0;
            for (double v : x) sum += v * v;
            return sum;
        }
        case BenchmarkFunction::Rosenbrock: {
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                const double a = x[i + 1] - x[i] * x[i];
                const double b = 1.0 - x[i];
                sum += 100.0 * a * a + b * b;
            }
            return sum;
        }
        case BenchmarkFunction::Rastrigin: {
            double sum = 0.0;
            for (double v : x) {
                sum += v * v + 10.0 * (1.0 - std::cos(2.0 * std::numbers::pi * v));
            }
            return sum;
        }
    }
    return 0.0;
}

} // namespace abmcalib
