#include "subjidx/logreg.hpp"

#include <cmath>
#include <numeric>

#include "subjidx/errors.hpp"
#include "subjidx/rng.hpp"

namespace subjidx {

double logistic_loss(const LogisticModel& model, const std::vector<LogisticExample>& examples,
                     double l2) {
    if (examples.empty()) throw ValidationError("logistic_loss: no examples");
    double loss = 0.0;
    for (const LogisticExample& ex : examples) {
        double z = model.decision(ex.features);
        // max(z,0) - z*y + log(1 + exp(-|z|)) is the stable form of BCE.
        loss += std::max(z, 0.0) - z * ex.label + std::log1p(std::exp(-std::abs(z)));
    }
    loss /= static_cast<double>(examples.size());
    double penalty = 0.0;
    for (double w : model.weights) penalty += w * w;
    return loss + 0.5 * l2 * penalty;
}

void logistic_gradient(const LogisticModel& model, const std::vector<LogisticExample>& examples,
                       double l2, std::vector<double>& grad_weights, double& grad_bias) {
    if (examples.empty()) throw ValidationError("logistic_gradient: no examples");
    grad_weights.assign(model.weights.size(), 0.0);
    grad_bias = 0.0;
    for (const LogisticExample& ex : examples) {
        double err = sigmoid(model.decision(ex.features)) - ex.label;
        add_scaled(grad_weights, ex.features, err);
        grad_bias += err;
    }
    double inv_n = 1.0 / static_cast<double>(examples.size());
    for (std::size_t i = 0; i < grad_weights.size(); ++i)
        grad_weights[i] = grad_weights[i] * inv_n + l2 * model.weights[i];
    grad_bias *= inv_n;
}

LogisticModel train_logistic(const std::vector<LogisticExample>& examples, std::size_t dim,
                             const LogisticOptions& options) {
    if (examples.empty()) throw NoTrainingSignalError("no training examples");

    LogisticModel model;
    model.weights.assign(dim, 0.0);

    Rng rng(options.seed);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx : order) {
            const LogisticExample& ex = examples[idx];
            double err = sigmoid(model.decision(ex.features)) - ex.label;
            for (const auto& [i, x] : ex.features.entries)
                model.weights[i] -= options.learning_rate * (err * x + options.l2 * model.weights[i]);
            model.bias -= options.learning_rate * err;
        }
    }
    return model;
}

}  // namespace subjidx
