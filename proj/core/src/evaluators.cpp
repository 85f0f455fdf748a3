#include "driftlab/evaluators.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "driftlab/metrics.hpp"

namespace driftlab {

std::vector<NamedMetric> default_metrics() {
    std::vector<NamedMetric> metrics;
    metrics.push_back({"accuracy",
                       [](std::span<const std::size_t> y,
                          std::span<const std::size_t> y_pred) {
                           return metrics::accuracy(y, y_pred);
                       }});
    metrics.push_back({"balanced_accuracy",
                       [](std::span<const std::size_t> y,
                          std::span<const std::size_t> y_pred) {
                           return metrics::balanced_accuracy(y, y_pred);
                       }});
    return metrics;
}

EvaluationError::EvaluationError(const std::string& message,
                                 std::size_t classifier_index, std::size_t chunk_index)
    : std::runtime_error(message), classifier_index_(classifier_index),
      chunk_index_(chunk_index) {}

SlidingWindow::SlidingWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) {
        throw std::invalid_argument("window capacity must be positive");
    }
}

void SlidingWindow::push_chunk(const Chunk& chunk) {
    if (chunk.size() > capacity_) {
        throw std::invalid_argument("window_size must be at least the chunk size");
    }
    if (labels_.empty()) {
        n_features_ = chunk.n_features();
    }
    for (std::size_t r = 0; r < chunk.size(); ++r) {
        const auto row = chunk.features().row(r);
        rows_.emplace_back(row.begin(), row.end());
        labels_.push_back(chunk.labels()[r]);
    }
    while (labels_.size() > capacity_) {
        rows_.pop_front();
        labels_.pop_front();
    }
}

std::vector<double> SlidingWindow::recent_chunk_weights(std::size_t chunk_rows) const {
    const double window = static_cast<double>(labels_.size());
    const double chunk = static_cast<double>(chunk_rows);
    // Line from weight 1 at the newest sample down toward chunk/window at
    // the window tail; at window == chunk this is constant 1.
    const double slope = (window - chunk) / (window * window);
    std::vector<double> weights(chunk_rows);
    for (std::size_t i = 0; i < chunk_rows; ++i) {
        const double age = static_cast<double>(chunk_rows - 1 - i);
        weights[i] = 1.0 - age * slope;
    }
    return weights;
}

Chunk SlidingWindow::contents() const {
    Matrix features(labels_.size(), n_features_);
    for (std::size_t r = 0; r < labels_.size(); ++r) {
        std::copy(rows_[r].begin(), rows_[r].end(), features.row(r).begin());
    }
    return Chunk(std::move(features), {labels_.begin(), labels_.end()});
}

namespace {

struct StepScores {
    std::vector<double> values;  // classifier-major, then metric
};

ScoreTensor run_protocol(ChunkSource& stream, std::span<NamedLearner> classifiers,
                         std::span<const NamedMetric> metrics,
                         std::size_t window_size) {
    const std::vector<NamedMetric> defaults =
        metrics.empty() ? default_metrics() : std::vector<NamedMetric>{};
    const std::span<const NamedMetric> active = metrics.empty() ? defaults : metrics;

    std::vector<std::size_t> declared(stream.n_classes());
    std::iota(declared.begin(), declared.end(), 0);

    const bool windowed = window_size > 0;
    std::optional<SlidingWindow> window;
    if (windowed) window.emplace(window_size);

    const auto train = [&](NamedLearner& classifier, const Chunk& chunk,
                           std::size_t classifier_index, std::size_t chunk_index) {
        try {
            if (windowed && classifier.learner->supports_sample_weights()) {
                const auto weights = window->recent_chunk_weights(chunk.size());
                classifier.learner->partial_fit(chunk, declared, weights);
            } else {
                classifier.learner->partial_fit(chunk, declared);
            }
        } catch (const std::exception& fault) {
            throw EvaluationError("classifier '" + classifier.name + "' failed to fit chunk " +
                                      std::to_string(chunk_index) + ": " + fault.what(),
                                  classifier_index, chunk_index);
        }
    };

    std::vector<StepScores> steps;
    std::size_t chunk_index = 0;

    while (auto chunk = stream.next()) {
        if (windowed) window->push_chunk(*chunk);

        if (chunk_index > 0) {
            StepScores step;
            step.values.resize(classifiers.size() * active.size());
            for (std::size_t c = 0; c < classifiers.size(); ++c) {
                Prediction prediction;
                try {
                    prediction = classifiers[c].learner->predict(chunk->features());
                } catch (const std::exception& fault) {
                    throw EvaluationError("classifier '" + classifiers[c].name +
                                              "' failed to predict chunk " +
                                              std::to_string(chunk_index) + ": " +
                                              fault.what(),
                                          c, chunk_index);
                }
                for (std::size_t m = 0; m < active.size(); ++m) {
                    step.values[c * active.size() + m] =
                        active[m].fn(chunk->labels(), prediction.labels);
                }
            }
            steps.push_back(std::move(step));
        }

        for (std::size_t c = 0; c < classifiers.size(); ++c) {
            train(classifiers[c], *chunk, c, chunk_index);
        }
        ++chunk_index;
    }

    std::vector<std::string> classifier_names;
    for (const NamedLearner& classifier : classifiers) {
        classifier_names.push_back(classifier.name);
    }
    std::vector<std::string> metric_names;
    for (const NamedMetric& metric : active) {
        metric_names.push_back(metric.name);
    }

    ScoreTensor tensor(std::move(classifier_names), steps.size(), std::move(metric_names));
    for (std::size_t s = 0; s < steps.size(); ++s) {
        for (std::size_t c = 0; c < classifiers.size(); ++c) {
            for (std::size_t m = 0; m < active.size(); ++m) {
                tensor.at(c, s, m) = steps[s].values[c * active.size() + m];
            }
        }
    }
    return tensor;
}

}  // namespace

ScoreTensor test_then_train(ChunkSource& stream, std::span<NamedLearner> classifiers,
                            std::span<const NamedMetric> metrics) {
    return run_protocol(stream, classifiers, metrics, 0);
}

ScoreTensor prequential(ChunkSource& stream, std::span<NamedLearner> classifiers,
                        std::size_t window_size, std::span<const NamedMetric> metrics) {
    if (window_size == 0) {
        throw std::invalid_argument("window_size must be positive");
    }
    return run_protocol(stream, classifiers, metrics, window_size);
}

std::size_t export_scores(const ScoreTensor& tensor, std::ostream& sink) {
    sink << "classifier,chunk,metric,value\n";
    std::size_t rows = 0;
    char buffer[40];
    for (std::size_t c = 0; c < tensor.n_classifiers(); ++c) {
        for (std::size_t s = 0; s < tensor.n_steps(); ++s) {
            for (std::size_t m = 0; m < tensor.n_metrics(); ++m) {
                const int n =
                    std::snprintf(buffer, sizeof buffer, "%.9g", tensor.at(c, s, m));
                sink << tensor.classifier_names()[c] << ',' << s + 1 << ','
                     << tensor.metric_names()[m] << ',';
                sink.write(buffer, n);
                sink << '\n';
                ++rows;
            }
        }
    }
    if (!sink) {
        throw std::runtime_error("score export failed");
    }
    return rows;
}

}  // namespace driftlab
