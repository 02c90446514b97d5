#include "abmcalib/param_space.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/rng.hpp"
#include "abmcalib/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace abmcalib {

ParameterSpace::ParameterSpace(std::vector<ParameterSpec> specs) : specs_(std::move(specs)) {
    std::unordered_set<std::string> seen;
    for (const auto& s : specs_) {
        if (s.name.empty()) {
            throw InputError("parameter with empty name");
        }
        if (!(s.lower < s.upper)) {
            throw InputError("parameter '" + s.name + "': lower bound must be strictly below upper");
        }
        if (s.initial < s.lower || s.initial > s.upper) {
            throw InputError("parameter '" + s.name + "': initial value outside [lower, upper]");
        }
        if (!seen.insert(s.name).second) {
            throw InputError("duplicate parameter name '" + s.name + "'");
        }
    }
}

ParameterSpace ParameterSpace::around_initials(const std::vector<std::string>& names,
                                               const std::vector<double>& initials,
                                               double half_width) {
    if (names.size() != initials.size()) {
        throw InputError("around_initials: names and initials differ in length");
    }
    std::vector<ParameterSpec> specs;
    specs.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double v = initials[i];
        const double w = half_width > 0.0 ? half_width : std::max(5.0, 2.0 * std::abs(v));
        specs.push_back({names[i], v - w, v + w, v});
    }
    return ParameterSpace(std::move(specs));
}

ParameterSpace ParameterSpace::uniform_box(std::size_t dimension, double lower, double upper,
                                           const std::string& prefix) {
    std::vector<ParameterSpec> specs;
    specs.reserve(dimension);
    for (std::size_t i = 0; i < dimension; ++i) {
        const double initial = std::clamp(0.0, lower, upper);
        specs.push_back({prefix + std::to_string(i), lower, upper, initial});
    }
    return ParameterSpace(std::move(specs));
}

std::size_t ParameterSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (specs_[i].name == name) return i;
    }
    throw InputError("unknown parameter name '" + name + "'");
}

bool ParameterSpace::contains(const std::string& name) const {
    return std::any_of(specs_.begin(), specs_.end(),
                       [&](const ParameterSpec& s) { return s.name == name; });
}

ParameterVector ParameterSpace::initial_point() const {
    ParameterVector v;
    v.values.reserve(specs_.size());
    for (const auto& s : specs_) v.values.push_back(s.initial);
    return v;
}

UnitVector ParameterSpace::normalize(const ParameterVector& v) const {
    if (v.size() != dimension()) {
        throw InputError("normalize: vector dimension " + std::to_string(v.size()) +
                         " does not match space dimension " + std::to_string(dimension()));
    }
    UnitVector u;
    u.values.resize(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) {
        u.values[i] = (v[i] - specs_[i].lower) / (specs_[i].upper - specs_[i].lower);
    }
    return u;
}

ParameterVector ParameterSpace::denormalize(const UnitVector& u) const {
    if (u.size() != dimension()) {
        throw InputError("denormalize: vector dimension " + std::to_string(u.size()) +
                         " does not match space dimension " + std::to_string(dimension()));
    }
    ParameterVector v;
    v.values.resize(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) {
        if (!(u[i] >= 0.0 && u[i] <= 1.0)) {
            throw InputError("denormalize: coordinate " + std::to_string(i) + " = " +
                             fmt_double(u[i]) + " outside [0,1]");
        }
        v.values[i] = specs_[i].lower + u[i] * (specs_[i].upper - specs_[i].lower);
    }
    return v;
}

ParameterVector ParameterSpace::clamp(const ParameterVector& v) const {
    if (v.size() != dimension()) {
        throw InputError("clamp: dimension mismatch");
    }
    ParameterVector out = v;
    for (std::size_t i = 0; i < dimension(); ++i) {
        out.values[i] = std::clamp(out.values[i], specs_[i].lower, specs_[i].upper);
    }
    return out;
}

std::vector<UnitVector> ParameterSpace::lhs_sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) {
        throw InputError("lhs_sample: sample count must be at least 1");
    }
    const std::size_t d = dimension();
    std::vector<UnitVector> points(n);
    for (auto& p : points) p.values.resize(d);

    Rng rng(derive_seed(seed, {0x1a5u}));
    std::vector<std::size_t> strata(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        // Fisher-Yates with the shared stream, then one offset per stratum.
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t k = static_cast<std::size_t>(rng.below(i + 1));
            std::swap(strata[i], strata[k]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            points[i].values[j] = (static_cast<double>(strata[i]) + rng.uniform()) /
                                  static_cast<double>(n);
        }
    }
    return points;
}

ParameterSpace ParameterSpace::load_csv(const std::string& path) {
    const std::string content = read_text_file(path);
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    std::vector<ParameterSpec> specs;
    while (std::getline(in, line)) {
        ++line_no;
        const auto sv = trim(line);
        if (sv.empty()) continue;
        const auto fields = split_csv(sv);
        if (line_no == 1) {
            if (fields.size() != 4 || fields[0] != "name" || fields[1] != "lower" ||
                fields[2] != "upper" || fields[3] != "initial") {
                throw ParseError(path, line_no, "expected header 'name,lower,upper,initial'");
            }
            continue;
        }
        if (fields.size() != 4) {
            throw ParseError(path, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        }
        try {
            specs.push_back({std::string(fields[0]), parse_double(fields[1]),
                             parse_double(fields[2]), parse_double(fields[3])});
        } catch (const InputError& e) {
            throw ParseError(path, line_no, e.what());
        }
    }
    if (specs.empty()) {
        throw ParseError(path, line_no, "no parameter rows");
    }
    try {
        return ParameterSpace(std::move(specs));
    } catch (const InputError& e) {
        throw ParseError(path, line_no, e.what());
    }
}

void ParameterSpace::save_csv(const std::string& path) const {
    std::string out = "name,lower,upper,initial\n";
    for (const auto& s : specs_) {
        out += s.name;
        out += ',';
        out += fmt_double(s.lower);
        out += ',';
        out += fmt_double(s.upper);
        out += ',';
        out += fmt_double(s.initial);
        out += '\n';
    }
    write_text_file(path, out);
}

} // namespace abmcalib
