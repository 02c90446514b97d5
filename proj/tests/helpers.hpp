#pragma once

#include "abmcalib/bo_engine.hpp"
#include "abmcalib/param_space.hpp"
#include "abmcalib/rng.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

namespace abmcalib::testing {

/// Temporary directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("abmcalib_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Equal-budget baseline: best objective over n uniform draws in the box.
inline double random_search_best(const ParameterSpace& space, Evaluator& evaluator,
                                 std::size_t n_draws, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x6a4du}));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_draws; ++i) {
        UnitVector u;
        u.values.resize(space.dimension());
        for (auto& v : u.values) v = rng.uniform();
        try {
            const double value = evaluator.evaluate(space.denormalize(u), rng.next_u64()).cost.eps_global;
            best = std::min(best, value);
        } catch (...) {
            // failures just burn budget, as they would for the optimizer
        }
    }
    return best;
}

} // namespace abmcalib::testing
