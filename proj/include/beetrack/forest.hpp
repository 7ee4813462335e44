#pragma once

#include "beetrack/linear_model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace beetrack {

/// Internal node when `feature >= 0` (x[feature] <= threshold goes left),
/// otherwise a leaf holding the positive-class fraction in `value`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// Nodes stored flat; index 0 is the root.
struct DecisionTree {
    std::vector<TreeNode> nodes;
    bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    int n_features = 0;
    std::uint64_t seed = 0;

    std::size_t n_trees() const { return trees.size(); }
};

struct ForestTrainConfig {
    int n_trees = 100;
    std::optional<int> max_depth;  // unlimited when empty
    int min_leaf = 1;
    std::uint64_t seed = 0;
    bool balance_classes = false;
};

struct ForestDiagnostics {
    double oob_accuracy = 0.0;
    std::size_t oob_samples = 0;
};

/// Bootstrap-aggregated CART trees with Gini splits over floor(sqrt(d))
/// randomly drawn features per node (more are drawn if none of those can
/// split). Tree i is seeded from (seed, i) alone, so the result does not
/// depend on evaluation order.
ForestModel train_forest(std::span<const LabeledSample> samples, const ForestTrainConfig& config = {},
                         ForestDiagnostics* diagnostics = nullptr);

double predict_tree(const DecisionTree& tree, std::span<const double> features);

/// Mean leaf fraction over all trees.
double predict_forest(const ForestModel& model, std::span<const double> features);

/// SplitMix64 finalizer; used to derive independent per-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace beetrack
