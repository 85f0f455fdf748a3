#ifndef DRIFTLAB_METRICS_HPP
#define DRIFTLAB_METRICS_HPP

#include <span>

#include "driftlab/datamodel.hpp"

namespace driftlab::metrics {

// Binary classification metrics computed from one confusion-matrix pass.
// Positive class is label 1. Zero denominators yield 0 across the board.

/// Counts TP/FP/FN/TN in a single pass. Throws std::invalid_argument on
/// length mismatch or labels outside {0,1}.
ConfusionMatrix confusion(std::span<const std::size_t> true_labels,
                          std::span<const std::size_t> predicted_labels);

double recall(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double specificity(const ConfusionMatrix& cm);

/// F-beta score; beta must be positive.
double f_beta(const ConfusionMatrix& cm, double beta);
double f1(const ConfusionMatrix& cm);

/// Mean of recall and specificity.
double balanced_accuracy(const ConfusionMatrix& cm);

/// sqrt(recall * specificity).
double geometric_mean_1(const ConfusionMatrix& cm);
/// sqrt(recall * precision).
double geometric_mean_2(const ConfusionMatrix& cm);

/// Fraction of equal positions; defined for any label alphabet. Empty
/// vectors score 0.
double accuracy(std::span<const std::size_t> true_labels,
                std::span<const std::size_t> predicted_labels);

// Label-vector forms of the binary metrics, for use as evaluator metric
// functions.
double recall(std::span<const std::size_t> y, std::span<const std::size_t> y_pred);
double precision(std::span<const std::size_t> y, std::span<const std::size_t> y_pred);
double specificity(std::span<const std::size_t> y, std::span<const std::size_t> y_pred);
double f1(std::span<const std::size_t> y, std::span<const std::size_t> y_pred);
double balanced_accuracy(std::span<const std::size_t> y, std::span<const std::size_t> y_pred);
double geometric_mean_1(std::span<const std::size_t> y, std::span<const std::size_t> y_pred);
double geometric_mean_2(std::span<const std::size_t> y, std::span<const std::size_t> y_pred);

}  // namespace driftlab::metrics

#endif  // DRIFTLAB_METRICS_HPP
