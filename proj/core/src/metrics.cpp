#include "driftlab/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace driftlab::metrics {

namespace {

double ratio(double numerator, double denominator) {
    return denominator > 0.0 ? numerator / denominator : 0.0;
}

}  // namespace

ConfusionMatrix confusion(std::span<const std::size_t> true_labels,
                          std::span<const std::size_t> predicted_labels) {
    if (true_labels.size() != predicted_labels.size()) {
        throw std::invalid_argument("label vectors differ in length");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const std::size_t y = true_labels[i];
        const std::size_t p = predicted_labels[i];
        if (y > 1 || p > 1) {
            throw std::invalid_argument("binary metrics accept labels in {0,1} only");
        }
        if (y == 1) {
            p == 1 ? ++cm.tp : ++cm.fn;
        } else {
            p == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

double recall(const ConfusionMatrix& cm) {
    return ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
}

double precision(const ConfusionMatrix& cm) {
    return ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
}

double specificity(const ConfusionMatrix& cm) {
    return ratio(static_cast<double>(cm.tn), static_cast<double>(cm.tn + cm.fp));
}

double f_beta(const ConfusionMatrix& cm, double beta) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("beta must be positive");
    }
    const double p = precision(cm);
    const double r = recall(cm);
    const double b2 = beta * beta;
    return ratio((1.0 + b2) * p * r, b2 * p + r);
}

double f1(const ConfusionMatrix& cm) { return f_beta(cm, 1.0); }

double balanced_accuracy(const ConfusionMatrix& cm) {
    return 0.5 * (recall(cm) + specificity(cm));
}

double geometric_mean_1(const ConfusionMatrix& cm) {
    return std::sqrt(recall(cm) * specificity(cm));
}

double geometric_mean_2(const ConfusionMatrix& cm) {
    return std::sqrt(recall(cm) * precision(cm));
}

double accuracy(std::span<const std::size_t> true_labels,
                std::span<const std::size_t> predicted_labels) {
    if (true_labels.size() != predicted_labels.size()) {
        throw std::invalid_argument("label vectors differ in length");
    }
    if (true_labels.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        hits += true_labels[i] == predicted_labels[i];
    }
    return static_cast<double>(hits) / static_cast<double>(true_labels.size());
}

double recall(std::span<const std::size_t> y, std::span<const std::size_t> y_pred) {
    return recall(confusion(y, y_pred));
}
double precision(std::span<const std::size_t> y, std::span<const std::size_t> y_pred) {
    return precision(confusion(y, y_pred));
}
double specificity(std::span<const std::size_t> y, std::span<const std::size_t> y_pred) {
    return specificity(confusion(y, y_pred));
}
double f1(std::span<const std::size_t> y, std::span<const std::size_t> y_pred) {
    return f1(confusion(y, y_pred));
}
double balanced_accuracy(std::span<const std::size_t> y, std::span<const std::size_t> y_pred) {
    return balanced_accuracy(confusion(y, y_pred));
}
double geometric_mean_1(std::span<const std::size_t> y, std::span<const std::size_t> y_pred) {
    return geometric_mean_1(confusion(y, y_pred));
}
double geometric_mean_2(std::span<const std::size_t> y, std::span<const std::size_t> y_pred) {
    return geometric_mean_2(confusion(y, y_pred));
}

}  // namespace driftlab::metrics
