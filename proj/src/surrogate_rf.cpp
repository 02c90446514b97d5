#include "abmcalib/surrogate_rf.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/rng.hpp"
#include "abmcalib/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace abmcalib {

namespace {

struct SplitChoice {
    bool found = false;
    std::size_t dim = 0;
    double threshold = 0.0;
    double children_sse = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& data, std::vector<std::size_t> sample_indices,
                std::size_t feature_budget, std::size_t min_leaf, std::uint64_t seed)
        : data_(data),
          indices_(std::move(sample_indices)),
          feature_budget_(feature_budget),
          min_leaf_(std::max<std::size_t>(min_leaf, 1)),
          rng_(seed),
          dim_pool_(data.dimension()) {
        std::iota(dim_pool_.begin(), dim_pool_.end(), std::size_t{0});
        sorted_.reserve(indices_.size());
    }

    RegressionTree build() {
        grow(0, indices_.size());
        return RegressionTree(std::move(nodes_));
    }

private:
    // Grows the subtree over indices_[begin, end) and returns its node id.
    std::int32_t grow(std::size_t begin, std::size_t end) {
        const std::size_t n = end - begin;
        double sum = 0.0;
        double sumsq = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            const double y = data_.targets[indices_[k]];
            sum += y;
            sumsq += y * y;
        }
        const double mean = sum / static_cast<double>(n);
        const double node_sse = std::max(0.0, sumsq - sum * sum / static_cast<double>(n));

        const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back({});
        if (n <= min_leaf_ || node_sse <= 0.0) {
            nodes_[id].value = mean;
            return id;
        }

        const SplitChoice split = best_split(begin, end, node_sse);
        if (!split.found) {
            nodes_[id].value = mean;
            return id;
        }

        const std::size_t mid = partition(begin, end, split.dim, split.threshold);
        nodes_[id].split_dim = static_cast<std::int32_t>(split.dim);
        nodes_[id].threshold = split.threshold;
        nodes_[id].left = grow(begin, mid);
        nodes_[id].right = grow(mid, end);
        return id;
    }

    SplitChoice best_split(std::size_t begin, std::size_t end, double node_sse) {
        // Candidate dims drawn without replacement, then evaluated in
        // ascending order so equal-gain ties resolve to the lowest index.
        const std::size_t d = data_.dimension();
        const std::size_t budget = std::min(feature_budget_, d);
        for (std::size_t i = 0; i < budget; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(d - i));
            std::swap(dim_pool_[i], dim_pool_[j]);
        }
        std::sort(dim_pool_.begin(), dim_pool_.begin() + static_cast<std::ptrdiff_t>(budget));

        SplitChoice best;
        best.children_sse = node_sse;
        for (std::size_t c = 0; c < budget; ++c) {
            scan_dimension(dim_pool_[c], begin, end, best);
        }
        return best;
    }

    void scan_dimension(std::size_t dim, std::size_t begin, std::size_t end, SplitChoice& best) {
        const std::size_t n = end - begin;
        sorted_.clear();
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t row = indices_[k];
            sorted_.push_back({data_.inputs[row][dim], data_.targets[row]});
        }
        std::sort(sorted_.begin(), sorted_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        double total_sum = 0.0;
        double total_sumsq = 0.0;
        for (const auto& [x, y] : sorted_) {
            total_sum += y;
            total_sumsq += y * y;
        }

        double left_sum = 0.0;
        double left_sumsq = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double y = sorted_[k].second;
            left_sum += y;
            left_sumsq += y * y;
            if (sorted_[k].first == sorted_[k + 1].first) continue; // no boundary here
            const double nl = static_cast<double>(k + 1);
            const double nr = static_cast<double>(n - k - 1);
            const double right_sum = total_sum - left_sum;
            const double right_sumsq = total_sumsq - left_sumsq;
            const double sse = (left_sumsq - left_sum * left_sum / nl) +
                               (right_sumsq - right_sum * right_sum / nr);
            if (sse < best.children_sse) {
                best.found = true;
                best.dim = dim;
                best.threshold = 0.5 * (sorted_[k].first + sorted_[k + 1].first);
                best.children_sse = sse;
            }
        }
    }

    // Stable two-sided partition of indices_[begin, end) on x[dim] <= threshold.
    std::size_t partition(std::size_t begin, std::size_t end, std::size_t dim, double threshold) {
        scratch_.clear();
        std::size_t write = begin;
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t row = indices_[k];
            if (data_.inputs[row][dim] <= threshold) {
                indices_[write++] = row;
            } else {
                scratch_.push_back(row);
            }
        }
        std::copy(scratch_.begin(), scratch_.end(), indices_.begin() + static_cast<std::ptrdiff_t>(write));
        return write;
    }

    const TrainingSet& data_;
    std::vector<std::size_t> indices_;
    std::size_t feature_budget_;
    std::size_t min_leaf_;
    Rng rng_;
    std::vector<std::size_t> dim_pool_;
    std::vector<std::pair<double, double>> sorted_;
    std::vector<std::size_t> scratch_;
    std::vector<RegressionTree::Node> nodes_;
};

void validate_training_set(const TrainingSet& data) {
    if (data.inputs.empty()) {
        throw InputError("training set is empty");
    }
    if (data.inputs.size() != data.targets.size()) {
        throw InputError("training set: inputs and targets differ in length");
    }
    const std::size_t d = data.dimension();
    if (d == 0) {
        throw InputError("training set: zero-dimensional inputs");
    }
    for (const auto& x : data.inputs) {
        if (x.size() != d) {
            throw InputError("training set: inconsistent input dimensions");
        }
    }
    for (double y : data.targets) {
        if (!std::isfinite(y)) {
            throw InputError("training set: non-finite target");
        }
    }
}

} // namespace

std::size_t RegressionTree::leaf_count() const {
    std::size_t count = 0;
    for (const auto& node : nodes_) {
        if (node.split_dim < 0) ++count;
    }
    return count;
}

RegressionTree fit_tree(const TrainingSet& data, std::size_t feature_budget,
                        std::size_t min_leaf, std::uint64_t seed) {
    validate_training_set(data);
    if (feature_budget < 1 || feature_budget > data.dimension()) {
        throw InputError("fit_tree: feature budget must be in [1, d]");
    }
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return TreeBuilder(data, std::move(all), feature_budget, min_leaf, seed).build();
}

RandomForest RandomForest::fit(const TrainingSet& data, const ForestHyperparams& hyperparams,
                               std::uint64_t master_seed) {
    validate_training_set(data);
    if (hyperparams.n_trees < 1) {
        throw InputError("fit_forest: at least one tree required");
    }
    const std::size_t d = data.dimension();
    const std::size_t budget =
        hyperparams.max_features > 0
            ? std::min(hyperparams.max_features, d)
            : d; // all dimensions; correlated trees keep far-field spread small
    const std::size_t min_leaf = std::max<std::size_t>(hyperparams.min_samples_leaf, 1);
    const std::size_t n = data.size();

    std::vector<RegressionTree> trees(hyperparams.n_trees);
    auto fit_one = [&](std::size_t i) {
        // Bootstrap and construction seeds keyed by tree index only, so the
        // forest is identical however the loop is scheduled.
        Rng boot(derive_seed(master_seed, {0xb007u, i}));
        std::vector<std::size_t> sample(n);
        for (auto& idx : sample) {
            idx = static_cast<std::size_t>(boot.below(n));
        }
        trees[i] = TreeBuilder(data, std::move(sample), budget, min_leaf,
                               derive_seed(master_seed, {0x72eeu, i}))
                       .build();
    };

    std::size_t n_threads = hyperparams.n_threads > 0
                                ? hyperparams.n_threads
                                : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, hyperparams.n_trees);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < hyperparams.n_trees; ++i) fit_one(i);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < hyperparams.n_trees; i += n_threads) fit_one(i);
            });
        }
        for (auto& w : workers) w.join();
    }

    return RandomForest(std::move(trees), d, hyperparams);
}

SurrogatePrediction RandomForest::predict(const UnitVector& x) const {
    if (!trained()) {
        throw StateError("predict: forest has not been fitted");
    }
    if (x.size() != dimension_) {
        throw InputError("predict: query dimension " + std::to_string(x.size()) +
                         " does not match training dimension " + std::to_string(dimension_));
    }
    const double c = static_cast<double>(trees_.size());
    double sum = 0.0;
    for (const auto& tree : trees_) {
        sum += tree.predict(x);
    }
    const double mean = sum / c;
    double varsum = 0.0;
    for (const auto& tree : trees_) {
        const double delta = mean - tree.predict(x);
        varsum += delta * delta;
    }
    return {mean, std::sqrt(varsum / c)};
}

std::vector<double> RandomForest::tree_predictions(const UnitVector& x) const {
    if (!trained()) {
        throw StateError("tree_predictions: forest has not been fitted");
    }
    std::vector<double> out;
    out.reserve(trees_.size());
    for (const auto& tree : trees_) {
        out.push_back(tree.predict(x));
    }
    return out;
}

void RandomForest::save(const std::string& path) const {
    if (!trained()) {
        throw StateError("save: forest has not been fitted");
    }
    std::string out = "ABMCALIB-RF v1\n";
    out += "dimension " + std::to_string(dimension_) + "\n";
    out += "trees " + std::to_string(trees_.size()) + "\n";
    for (const auto& tree : trees_) {
        out += "tree " + std::to_string(tree.nodes().size()) + "\n";
        for (const auto& n : tree.nodes()) {
            out += std::to_string(n.split_dim);
            out += ' ';
            out += fmt_double(n.threshold);
            out += ' ';
            out += std::to_string(n.left);
            out += ' ';
            out += std::to_string(n.right);
            out += ' ';
            out += fmt_double(n.value);
            out += '\n';
        }
    }
    write_text_file(path, out);
}

RandomForest RandomForest::load(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> std::string& {
        if (!std::getline(in, line)) {
            throw ParseError(path, line_no, "unexpected end of file");
        }
        ++line_no;
        return line;
    };

    if (next_line() != "ABMCALIB-RF v1") {
        throw ParseError(path, line_no, "bad magic header; expected 'ABMCALIB-RF v1'");
    }

    auto keyed_value = [&](const std::string& key) -> std::size_t {
        const std::string& l = next_line();
        if (l.rfind(key + " ", 0) != 0) {
            throw ParseError(path, line_no, "expected '" + key + " <n>'");
        }
        return static_cast<std::size_t>(parse_int(std::string_view(l).substr(key.size() + 1)));
    };

    const std::size_t dimension = keyed_value("dimension");
    const std::size_t n_trees = keyed_value("trees");
    if (dimension == 0 || n_trees == 0) {
        throw ParseError(path, line_no, "dimension and tree count must be positive");
    }

    std::vector<RegressionTree> trees;
    trees.reserve(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        const std::size_t n_nodes = keyed_value("tree");
        std::vector<RegressionTree::Node> nodes(n_nodes);
        for (auto& node : nodes) {
            std::istringstream fields(next_line());
            long long dim = 0, left = 0, right = 0;
            std::string thr, val;
            if (!(fields >> dim >> thr >> left >> right >> val)) {
                throw ParseError(path, line_no, "malformed node line");
            }
            node.split_dim = static_cast<std::int32_t>(dim);
            node.threshold = parse_double(thr);
            node.left = static_cast<std::int32_t>(left);
            node.right = static_cast<std::int32_t>(right);
            node.value = parse_double(val);
            if (node.split_dim >= static_cast<std::int32_t>(dimension)) {
                throw ParseError(path, line_no, "split dimension out of range");
            }
        }
        trees.emplace_back(std::move(nodes));
    }
    return RandomForest(std::move(trees), dimension, ForestHyperparams{n_trees, 1, 0, 0});
}

} // namespace abmcalib
