#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace abmcalib {

/// One calibrated parameter: a named box-bounded real with a starting value.
struct ParameterSpec {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    double initial = 0.0;
};

/// A point in raw (simulator) units, laid out in space declaration order.
struct ParameterVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// A point in normalized [0,1]^d coordinates. All surrogate and acquisition
/// work happens here; only simulator calls see raw units.
struct UnitVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Ordered, named search space. The declaration order defines the vector
/// layout used by every ParameterVector / UnitVector in a calibration.
class ParameterSpace {
public:
    ParameterSpace() = default;

    /// Validates bounds (lower < upper, initial inside) and name uniqueness.
    explicit ParameterSpace(std::vector<ParameterSpec> specs);

    /// Builds a space around given starting values with per-parameter box
    /// [initial - w, initial + w]. A half-width of 0 selects the default
    /// w = max(5, 2|initial|), which keeps the initial point interior and
    /// gives zero-valued parameters room to activate.
    static ParameterSpace around_initials(const std::vector<std::string>& names,
                                          const std::vector<double>& initials,
                                          double half_width = 0.0);

    /// d identically-bounded axes named <prefix>0..<prefix>d-1; used for
    /// benchmark problems and dimensional stress tests.
    static ParameterSpace uniform_box(std::size_t dimension, double lower, double upper,
                                      const std::string& prefix = "x");

    std::size_t dimension() const { return specs_.size(); }
    const std::vector<ParameterSpec>& specs() const { return specs_; }
    const ParameterSpec& spec(std::size_t i) const { return specs_[i]; }

    /// Index of a named parameter; throws InputError if absent.
    std::size_t index_of(const std::string& name) const;
    bool contains(const std::string& name) const;

    ParameterVector initial_point() const;

    /// u_i = (v_i - lower_i) / (upper_i - lower_i).
    UnitVector normalize(const ParameterVector& v) const;

    /// Exact affine inverse of normalize; rejects coordinates outside [0,1].
    ParameterVector denormalize(const UnitVector& u) const;

    ParameterVector clamp(const ParameterVector& v) const;

    /// Latin Hypercube design of n points in [0,1)^d: per dimension, one
    /// sample in each stratum [k/n, (k+1)/n), with seeded stratum
    /// permutations and uniform within-stratum offsets.
    std::vector<UnitVector> lhs_sample(std::size_t n, std::uint64_t seed) const;

    /// Parses the `name,lower,upper,initial` CSV format.
    static ParameterSpace load_csv(const std::string& path);
    void save_csv(const std::string& path) const;

private:
    std::vector<ParameterSpec> specs_;
};

} // namespace abmcalib
