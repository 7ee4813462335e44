#include "beetrack/linear_model.hpp"

#include "beetrack/errors.hpp"

#include <cmath>
#include <iostream>
#include <random>
#include <string>

namespace beetrack {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

} // namespace

double logistic_loss(std::span<const double> weights, double bias,
                     std::span<const std::vector<double>> standardized, std::span<const char> labels,
                     std::span<const double> sample_weights, double l2,
                     std::vector<double>* grad_w, double* grad_b) {
    const std::size_t dim = weights.size();
    if (grad_w) grad_w->assign(dim, 0.0);
    if (grad_b) *grad_b = 0.0;

    double loss = 0.0, total_weight = 0.0;
    for (std::size_t i = 0; i < standardized.size(); ++i) {
        const auto& x = standardized[i];
        const double sw = sample_weights.empty() ? 1.0 : sample_weights[i];
        double z = bias;
        for (std::size_t k = 0; k < dim; ++k) z += weights[k] * x[k];
        // -[y log p + (1-y) log(1-p)] = softplus(z) - y z
        loss += sw * (softplus(z) - (labels[i] ? z : 0.0));
        total_weight += sw;
        const double residual = sw * (sigmoid(z) - (labels[i] ? 1.0 : 0.0));
        if (grad_w)
            for (std::size_t k = 0; k < dim; ++k) (*grad_w)[k] += residual * x[k];
        if (grad_b) *grad_b += residual;
    }

    double reg = 0.0;
    for (double w : weights) reg += w * w;
    loss = loss / total_weight + 0.5 * l2 * reg;
    if (grad_w)
        for (std::size_t k = 0; k < dim; ++k) (*grad_w)[k] = (*grad_w)[k] / total_weight + l2 * weights[k];
    if (grad_b) *grad_b /= total_weight;
    return loss;
}

LinearModel train_linear(std::span<const LabeledSample> samples, const LinearTrainConfig& config) {
    if (samples.empty()) throw TrainingError("train_linear: no samples");
    const std::size_t dim = samples.front().features.size();
    std::size_t positives = 0;
    for (const auto& s : samples) {
        if (s.features.size() != dim) throw InvalidInput("train_linear: inconsistent feature lengths");
        positives += s.label ? 1 : 0;
    }
    if (positives == 0 || positives == samples.size())
        throw TrainingError("train_linear: samples must contain both classes");
    if (!(config.l2 > 0.0)) throw InvalidInput("train_linear: l2 must be positive");

    const double n = static_cast<double>(samples.size());
    LinearModel model;
    model.feature_means.assign(dim, 0.0);
    model.feature_stds.assign(dim, 0.0);
    for (const auto& s : samples)
        for (std::size_t k = 0; k < dim; ++k) model.feature_means[k] += s.features[k];
    for (auto& m : model.feature_means) m /= n;
    for (const auto& s : samples)
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = s.features[k] - model.feature_means[k];
            model.feature_stds[k] += d * d;
        }
    for (std::size_t k = 0; k < dim; ++k) {
        double sd = std::sqrt(model.feature_stds[k] / n);
        if (!(sd > 1e-12)) {
            std::cerr << "warning: train_linear: feature " << k << " has zero variance; std clamped to 1\n";
            sd = 1.0;
        }
        model.feature_stds[k] = sd;
    }

    std::vector<std::vector<double>> standardized(samples.size(), std::vector<double>(dim));
    std::vector<char> labels(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t k = 0; k < dim; ++k)
            standardized[i][k] = (samples[i].features[k] - model.feature_means[k]) / model.feature_stds[k];
        labels[i] = samples[i].label ? 1 : 0;
    }
    std::vector<double> sample_weights;
    if (config.balance_classes) {
        const double wp = n / (2.0 * static_cast<double>(positives));
        const double wn = n / (2.0 * static_cast<double>(samples.size() - positives));
        sample_weights.resize(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) sample_weights[i] = labels[i] ? wp : wn;
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    model.weights.resize(dim);
    for (auto& w : model.weights) w = jitter(rng);
    model.bias = 0.0;

    std::vector<double> grad_w;
    double grad_b = 0.0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        logistic_loss(model.weights, model.bias, standardized, labels, sample_weights, config.l2, &grad_w, &grad_b);
        for (std::size_t k = 0; k < dim; ++k) model.weights[k] -= config.lr * grad_w[k];
        model.bias -= config.lr * grad_b;
    }
    return model;
}

double predict_linear(const LinearModel& model, std::span<const double> features) {
    if (features.size() != model.n_features())
        throw InvalidInput("predict_linear: expected " + std::to_string(model.n_features()) + " features, got " +
                           std::to_string(features.size()));
    double z = model.bias;
    for (std::size_t k = 0; k < features.size(); ++k)
        z += model.weights[k] * (features[k] - model.feature_means[k]) / model.feature_stds[k];
    return sigmoid(z);
}

} // namespace beetrack
