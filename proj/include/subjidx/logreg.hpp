#pragma once

#include <cstdint>
#include <vector>

#include "subjidx/sparse.hpp"

namespace subjidx {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

struct LogisticExample {
    SparseVec features;
    double label = 0.0;  // 0 or 1
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;

    double decision(const SparseVec& x) const { return dot(x, weights) + bias; }
    double predict(const SparseVec& x) const { return sigmoid(decision(x)); }
};

struct LogisticOptions {
    double learning_rate = 0.1;
    int epochs = 200;
    double l2 = 1e-4;
    std::uint64_t seed = 42;
};

/// Mean binary cross-entropy plus 0.5 * l2 * ||w||^2 (bias unpenalized).
double logistic_loss(const LogisticModel& model, const std::vector<LogisticExample>& examples,
                     double l2);

/// Analytic gradient of logistic_loss with respect to weights and bias.
void logistic_gradient(const LogisticModel& model, const std::vector<LogisticExample>& examples,
                       double l2, std::vector<double>& grad_weights, double& grad_bias);

/// Per-example SGD with seeded shuffling; deterministic for a fixed seed.
LogisticModel train_logistic(const std::vector<LogisticExample>& examples, std::size_t dim,
                             const LogisticOptions& options);

}  // namespace subjidx
