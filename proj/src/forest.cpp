#include "beetrack/forest.hpp"

#include "beetrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace beetrack {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

struct TrainingSet {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<std::vector<double>> columns;  // columns[f][i]
    std::vector<char> labels;
    double weight_pos = 1.0;
    double weight_neg = 1.0;
};

struct ClassMass {
    double pos = 0.0;
    double neg = 0.0;
    double total() const { return pos + neg; }
    // Gini impurity times node mass.
    double weighted_gini() const {
        const double t = total();
        return t > 0.0 ? 2.0 * pos * neg / t : 0.0;
    }
};

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& data, const ForestTrainConfig& config, std::mt19937_64& rng)
        : data_(data), config_(config), rng_(rng) {
        features_per_split_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(data.dim))));
    }

    DecisionTree build(std::vector<std::uint32_t> bag) {
        DecisionTree tree;
        struct Pending {
            std::int32_t node;
            std::vector<std::uint32_t> rows;
            int depth;
        };
        tree.nodes.emplace_back();
        std::vector<Pending> stack;
        stack.push_back({0, std::move(bag), 0});
        while (!stack.empty()) {
            Pending job = std::move(stack.back());
            stack.pop_back();
            const ClassMass mass = mass_of(job.rows);
            const bool depth_limited = config_.max_depth && job.depth >= *config_.max_depth;
            const bool too_small = job.rows.size() < 2 * static_cast<std::size_t>(config_.min_leaf);
            SplitChoice split;
            if (mass.pos > 0.0 && mass.neg > 0.0 && !depth_limited && !too_small) split = find_split(job.rows);
            if (split.feature < 0) {
                tree.nodes[job.node].value = mass.pos / mass.total();
                continue;
            }
            std::vector<std::uint32_t> left, right;
            const auto& col = data_.columns[split.feature];
            for (auto r : job.rows) (col[r] <= split.threshold ? left : right).push_back(r);

            const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& node = tree.nodes[job.node];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left = left_id;
            node.right = left_id + 1;
            // right first so the left subtree is expanded next
            stack.push_back({left_id + 1, std::move(right), job.depth + 1});
            stack.push_back({left_id, std::move(left), job.depth + 1});
        }
        return tree;
    }

private:
    ClassMass mass_of(const std::vector<std::uint32_t>& rows) const {
        ClassMass m;
        for (auto r : rows) (data_.labels[r] ? m.pos += data_.weight_pos : m.neg += data_.weight_neg);
        return m;
    }

    SplitChoice find_split(const std::vector<std::uint32_t>& rows) {
        std::vector<std::size_t> order(data_.dim);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng_);

        const ClassMass total = mass_of(rows);
        SplitChoice best;
        std::vector<std::pair<double, std::uint32_t>> sorted(rows.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k >= features_per_split_ && best.feature >= 0) break;
            const auto f = order[k];
            const auto& col = data_.columns[f];
            for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {col[rows[i]], rows[i]};
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;

            ClassMass left;
            const std::size_t min_leaf = static_cast<std::size_t>(config_.min_leaf);
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                (data_.labels[sorted[i].second] ? left.pos += data_.weight_pos : left.neg += data_.weight_neg);
                const double a = sorted[i].first, b = sorted[i + 1].first;
                if (a == b) continue;
                const std::size_t n_left = i + 1;
                if (n_left < min_leaf || sorted.size() - n_left < min_leaf) continue;
                const ClassMass right{total.pos - left.pos, total.neg - left.neg};
                const double score = left.weighted_gini() + right.weighted_gini();
                if (best.feature < 0 || score < best.score) {
                    double mid = a + (b - a) / 2.0;
                    if (mid >= b) mid = a;
                    best = {static_cast<int>(f), mid, score};
                }
            }
        }
        return best;
    }

    const TrainingSet& data_;
    const ForestTrainConfig& config_;
    std::mt19937_64& rng_;
    std::size_t features_per_split_ = 1;
};

} // namespace

ForestModel train_forest(std::span<const LabeledSample> samples, const ForestTrainConfig& config,
                         ForestDiagnostics* diagnostics) {
    if (samples.empty()) throw TrainingError("train_forest: no samples");
    if (config.n_trees <= 0) throw InvalidInput("train_forest: n_trees must be positive");
    if (config.min_leaf <= 0) throw InvalidInput("train_forest: min_leaf must be positive");

    TrainingSet data;
    data.n = samples.size();
    data.dim = samples.front().features.size();
    if (data.dim == 0) throw InvalidInput("train_forest: samples have no features");
    data.columns.assign(data.dim, std::vector<double>(data.n));
    data.labels.resize(data.n);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < data.n; ++i) {
        if (samples[i].features.size() != data.dim) throw InvalidInput("train_forest: inconsistent feature lengths");
        for (std::size_t f = 0; f < data.dim; ++f) data.columns[f][i] = samples[i].features[f];
        data.labels[i] = samples[i].label ? 1 : 0;
        positives += data.labels[i];
    }
    if (positives == 0 || positives == data.n)
        throw TrainingError("train_forest: samples must contain both classes");
    if (config.balance_classes) {
        const double n = static_cast<double>(data.n);
        data.weight_pos = n / (2.0 * static_cast<double>(positives));
        data.weight_neg = n / (2.0 * static_cast<double>(data.n - positives));
    }

    ForestModel model;
    model.n_features = static_cast<int>(data.dim);
    model.seed = config.seed;
    model.trees.reserve(static_cast<std::size_t>(config.n_trees));

    std::vector<double> oob_sum(diagnostics ? data.n : 0, 0.0);
    std::vector<std::uint32_t> oob_count(diagnostics ? data.n : 0, 0);
    std::vector<char> in_bag;

    for (int t = 0; t < config.n_trees; ++t) {
        std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(t)));
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(data.n - 1));
        std::vector<std::uint32_t> bag(data.n);
        for (auto& b : bag) b = pick(rng);

        if (diagnostics) {
            in_bag.assign(data.n, 0);
            for (auto b : bag) in_bag[b] = 1;
        }
        TreeBuilder builder(data, config, rng);
        model.trees.push_back(builder.build(std::move(bag)));

        if (diagnostics) {
            std::vector<double> x(data.dim);
            for (std::size_t i = 0; i < data.n; ++i) {
                if (in_bag[i]) continue;
                for (std::size_t f = 0; f < data.dim; ++f) x[f] = data.columns[f][i];
                oob_sum[i] += predict_tree(model.trees.back(), x);
                ++oob_count[i];
            }
        }
    }

    if (diagnostics) {
        std::size_t correct = 0, counted = 0;
        for (std::size_t i = 0; i < data.n; ++i) {
            if (oob_count[i] == 0) continue;
            ++counted;
            const bool predicted = oob_sum[i] / oob_count[i] >= 0.5;
            correct += predicted == static_cast<bool>(data.labels[i]) ? 1 : 0;
        }
        diagnostics->oob_samples = counted;
        diagnostics->oob_accuracy = counted ? static_cast<double>(correct) / static_cast<double>(counted) : 0.0;
    }
    return model;
}

double predict_tree(const DecisionTree& tree, std::span<const double> features) {
    std::size_t i = 0;
    while (!tree.nodes[i].is_leaf()) {
        const auto& node = tree.nodes[i];
        i = static_cast<std::size_t>(features[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                       : node.right);
    }
    return tree.nodes[i].value;
}

double predict_forest(const ForestModel& model, std::span<const double> features) {
    if (features.size() != static_cast<std::size_t>(model.n_features))
        throw InvalidInput("predict_forest: expected " + std::to_string(model.n_features) + " features, got " +
                           std::to_string(features.size()));
    if (model.trees.empty()) throw InvalidInput("predict_forest: model has no trees");
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += predict_tree(tree, features);
    return sum / static_cast<double>(model.trees.size());
}

} // namespace beetrack
