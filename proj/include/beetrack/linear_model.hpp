#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace beetrack {

struct LabeledSample {
    std::vector<double> features;
    bool label = false;
};

/// Logistic regression on z-standardized features.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> feature_means;
    std::vector<double> feature_stds;

    std::size_t n_features() const { return weights.size(); }
};

struct LinearTrainConfig {
    double l2 = 1e-4;
    int epochs = 2000;
    double lr = 0.5;
    std::uint64_t seed = 0;
    /// Weight each class by total / (2 * class_count).
    bool balance_classes = false;
};

/// Fits weights by full-batch gradient descent on the mean L2-regularized
/// logistic loss. Weights start from a small seeded perturbation around
/// zero, so results are reproducible for a fixed seed. Zero-variance
/// features get std 1 and a warning on stderr.
LinearModel train_linear(std::span<const LabeledSample> samples, const LinearTrainConfig& config = {});

double predict_linear(const LinearModel& model, std::span<const double> features);

/// Mean weighted logistic loss plus (l2 / 2) * |w|^2 over already
/// standardized inputs; gradient is written to `grad_w` / `grad_b`.
/// `sample_weights` may be empty (all ones).
double logistic_loss(std::span<const double> weights, double bias,
                     std::span<const std::vector<double>> standardized, std::span<const char> labels,
                     std::span<const double> sample_weights, double l2,
                     std::vector<double>* grad_w = nullptr, double* grad_b = nullptr);

double sigmoid(double z);

} // namespace beetrack
