#pragma once

#include "abmcalib/param_space.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace abmcalib {

/// Inputs in unit-cube coordinates and their observed discrepancy values.
struct TrainingSet {
    std::vector<UnitVector> inputs;
    std::vector<double> targets;

    std::size_t size() const { return inputs.size(); }
    std::size_t dimension() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

struct ForestHyperparams {
    std::size_t n_trees = 1000;
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0; // 0 selects ceil(d / 3)
    std::size_t n_threads = 0;    // 0 selects hardware concurrency
};

/// Normal predictive summary of the ensemble at one point.
struct SurrogatePrediction {
    double mean = 0.0;
    double std = 0.0;
};

/// Binary regression tree in flat array form. Leaves predict the mean of
/// the training targets routed to them.
class RegressionTree {
public:
    struct Node {
        std::int32_t split_dim = -1; // -1 marks a leaf
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        double value = 0.0;
    };

    RegressionTree() = default;
    explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    double predict(const UnitVector& x) const {
        const Node* node = &nodes_[0];
        while (node->split_dim >= 0) {
            node = &nodes_[x[static_cast<std::size_t>(node->split_dim)] <= node->threshold
                               ? static_cast<std::size_t>(node->left)
                               : static_cast<std::size_t>(node->right)];
        }
        return node->value;
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t leaf_count() const;

private:
    std::vector<Node> nodes_;
};

/// Fits one tree on the whole training set. At every node, feature_budget
/// candidate dimensions are drawn without replacement from the seeded
/// generator; the split minimizing the summed squared error of the two
/// children wins, with ties broken by lowest dimension then lowest
/// threshold. Splitting stops when a node holds at most min_leaf samples
/// or no split reduces the error.
RegressionTree fit_tree(const TrainingSet& data, std::size_t feature_budget,
                        std::size_t min_leaf, std::uint64_t seed);

/// Ensemble of trees, each grown on an independent bootstrap resample with
/// a seed derived from (master_seed, tree index). Fitting may fan out over
/// threads; the result is identical regardless of scheduling.
class RandomForest {
public:
    RandomForest() = default;

    static RandomForest fit(const TrainingSet& data, const ForestHyperparams& hyperparams,
                            std::uint64_t master_seed);

    /// Assembles a forest from prebuilt trees (deserialization, tests).
    static RandomForest from_trees(std::vector<RegressionTree> trees, std::size_t dimension) {
        return RandomForest(std::move(trees), dimension, ForestHyperparams{});
    }

    bool trained() const { return !trees_.empty(); }
    std::size_t n_trees() const { return trees_.size(); }
    std::size_t dimension() const { return dimension_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }

    /// Empirical mean over the ensemble and population standard deviation
    /// (divisor C) of the per-tree predictions.
    SurrogatePrediction predict(const UnitVector& x) const;

    std::vector<double> tree_predictions(const UnitVector& x) const;

    /// Checkpoint format: structured text with magic header "ABMCALIB-RF v1".
    void save(const std::string& path) const;
    static RandomForest load(const std::string& path);

private:
    RandomForest(std::vector<RegressionTree> trees, std::size_t dimension,
                 ForestHyperparams hyperparams)
        : trees_(std::move(trees)), dimension_(dimension), hyperparams_(hyperparams) {}

    std::vector<RegressionTree> trees_;
    std::size_t dimension_ = 0;
    ForestHyperparams hyperparams_;
};

} // namespace abmcalib
