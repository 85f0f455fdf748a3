#include "driftlab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace driftlab {

namespace {

void check_weights(const Chunk& chunk, std::span<const double> sample_weights) {
    if (sample_weights.empty()) return;
    if (sample_weights.size() != chunk.size()) {
        throw std::invalid_argument("sample_weights length does not match chunk size");
    }
    for (double w : sample_weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("sample weights must be non-negative");
        }
    }
}

void resolve_declared(std::vector<std::size_t>& stored,
                      std::span<const std::size_t> declared, const Chunk& chunk) {
    if (stored.empty()) {
        if (declared.empty()) {
            throw std::invalid_argument("declared_classes required at first partial_fit");
        }
        stored.assign(declared.begin(), declared.end());
    } else if (!declared.empty() &&
               !std::equal(declared.begin(), declared.end(), stored.begin(),
                           stored.end())) {
        throw std::invalid_argument("declared_classes changed after first partial_fit");
    }
    for (std::size_t label : chunk.labels()) {
        if (std::find(stored.begin(), stored.end(), label) == stored.end()) {
            throw std::invalid_argument("label " + std::to_string(label) +
                                        " was not declared at first partial_fit");
        }
    }
}

}  // namespace

LearnerFactory gaussian_nb_factory() {
    return [] { return std::make_unique<GaussianNB>(); };
}

std::size_t GaussianNB::class_position(std::size_t label) const {
    for (std::size_t i = 0; i < declared_.size(); ++i) {
        if (declared_[i] == label) return i;
    }
    throw std::invalid_argument("label " + std::to_string(label) + " not declared");
}

void GaussianNB::partial_fit(const Chunk& chunk,
                             std::span<const std::size_t> declared_classes,
                             std::span<const double> sample_weights) {
    check_weights(chunk, sample_weights);
    resolve_declared(declared_, declared_classes, chunk);
    if (!fitted_) {
        n_features_ = chunk.n_features();
        classes_.resize(declared_.size());
        for (ClassMoments& moments : classes_) {
            moments.mean.assign(n_features_, 0.0);
            moments.m2.assign(n_features_, 0.0);
        }
    } else if (chunk.n_features() != n_features_) {
        throw std::invalid_argument("chunk feature count does not match the model");
    }

    // Two-pass batch moments per class over this chunk, merged into the
    // running moments with Chan's parallel combination.
    std::vector<double> batch_weight(classes_.size(), 0.0);
    Matrix batch_mean(classes_.size(), n_features_);
    Matrix batch_m2(classes_.size(), n_features_);

    const auto weight_of = [&](std::size_t row) {
        return sample_weights.empty() ? 1.0 : sample_weights[row];
    };

    for (std::size_t r = 0; r < chunk.size(); ++r) {
        const std::size_t c = class_position(chunk.labels()[r]);
        const double w = weight_of(r);
        batch_weight[c] += w;
        const auto row = chunk.features().row(r);
        for (std::size_t f = 0; f < n_features_; ++f) {
            batch_mean(c, f) += w * row[f];
        }
    }
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        if (batch_weight[c] <= 0.0) continue;
        for (std::size_t f = 0; f < n_features_; ++f) {
            batch_mean(c, f) /= batch_weight[c];
        }
    }
    for (std::size_t r = 0; r < chunk.size(); ++r) {
        const std::size_t c = class_position(chunk.labels()[r]);
        const double w = weight_of(r);
        if (w <= 0.0) continue;
        const auto row = chunk.features().row(r);
        for (std::size_t f = 0; f < n_features_; ++f) {
            const double d = row[f] - batch_mean(c, f);
            batch_m2(c, f) += w * d * d;
        }
    }

    for (std::size_t c = 0; c < classes_.size(); ++c) {
        if (batch_weight[c] <= 0.0) continue;
        ClassMoments& running = classes_[c];
        const double w_a = running.weight;
        const double w_b = batch_weight[c];
        const double w = w_a + w_b;
        for (std::size_t f = 0; f < n_features_; ++f) {
            const double delta = batch_mean(c, f) - running.mean[f];
            running.mean[f] += delta * w_b / w;
            running.m2[f] += batch_m2(c, f) + delta * delta * w_a * w_b / w;
        }
        running.weight = w;
    }
    fitted_ = true;
}

double GaussianNB::class_weight(std::size_t class_position) const {
    return classes_.at(class_position).weight;
}

double GaussianNB::mean(std::size_t class_position, std::size_t feature) const {
    return classes_.at(class_position).mean.at(feature);
}

double GaussianNB::variance(std::size_t class_position, std::size_t feature) const {
    const ClassMoments& moments = classes_.at(class_position);
    return moments.weight > 0.0 ? moments.m2.at(feature) / moments.weight : 0.0;
}

double GaussianNB::prior(std::size_t class_position) const {
    double total = 0.0;
    for (const ClassMoments& moments : classes_) total += moments.weight;
    return total > 0.0 ? classes_.at(class_position).weight / total : 0.0;
}

Prediction GaussianNB::predict(const Matrix& features) const {
    if (!fitted_) {
        throw std::logic_error("predict before the first partial_fit");
    }
    if (features.cols() != n_features_ && features.rows() > 0) {
        throw std::invalid_argument("feature count does not match the model");
    }

    double total_weight = 0.0;
    double max_variance = 0.0;
    for (const ClassMoments& moments : classes_) {
        total_weight += moments.weight;
        if (moments.weight <= 0.0) continue;
        for (std::size_t f = 0; f < n_features_; ++f) {
            max_variance = std::max(max_variance, moments.m2[f] / moments.weight);
        }
    }
    if (total_weight <= 0.0) {
        throw std::logic_error("model holds no training weight");
    }
    const double floor = std::max(1e-12, 1e-9 * max_variance);

    Prediction prediction;
    prediction.labels.resize(features.rows());
    Matrix support(features.rows(), classes_.size());
    std::vector<double> log_joint(classes_.size());

    for (std::size_t r = 0; r < features.rows(); ++r) {
        const auto row = features.row(r);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_class = 0;
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            const ClassMoments& moments = classes_[c];
            if (moments.weight <= 0.0) {
                log_joint[c] = -std::numeric_limits<double>::infinity();
                continue;
            }
            double value = std::log(moments.weight / total_weight);
            for (std::size_t f = 0; f < n_features_; ++f) {
                const double variance = std::max(moments.m2[f] / moments.weight, floor);
                const double d = row[f] - moments.mean[f];
                value += -0.5 * std::log(2.0 * std::numbers::pi * variance) -
                         d * d / (2.0 * variance);
            }
            log_joint[c] = value;
            if (value > best) {
                best = value;
                best_class = c;
            }
        }
        prediction.labels[r] = declared_[best_class];

        double normalizer = 0.0;
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            normalizer += std::exp(log_joint[c] - best);
        }
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            support(r, c) = std::exp(log_joint[c] - best) / normalizer;
        }
    }
    prediction.support = std::move(support);
    return prediction;
}

std::unique_ptr<Learner> GaussianNB::clone_unfitted() const {
    return std::make_unique<GaussianNB>();
}

AccumulatedSamples::AccumulatedSamples(LearnerFactory base_factory)
    : factory_(std::move(base_factory)) {}

void AccumulatedSamples::partial_fit(const Chunk& chunk,
                                     std::span<const std::size_t> declared_classes,
                                     std::span<const double> sample_weights) {
    check_weights(chunk, sample_weights);
    resolve_declared(declared_, declared_classes, chunk);
    if (buffered_labels_.empty()) {
        n_features_ = chunk.n_features();
    } else if (chunk.n_features() != n_features_) {
        throw std::invalid_argument("chunk feature count does not match the buffer");
    }

    const auto data = chunk.features().data();
    buffered_values_.insert(buffered_values_.end(), data.begin(), data.end());
    buffered_labels_.insert(buffered_labels_.end(), chunk.labels().begin(),
                            chunk.labels().end());

    Matrix all(buffered_labels_.size(), n_features_);
    std::copy(buffered_values_.begin(), buffered_values_.end(), all.data().begin());
    auto fresh = factory_();
    fresh->partial_fit(Chunk(std::move(all), buffered_labels_), declared_);
    model_ = std::move(fresh);
}

Prediction AccumulatedSamples::predict(const Matrix& features) const {
    if (!model_) {
        throw std::logic_error("predict before the first partial_fit");
    }
    return model_->predict(features);
}

std::unique_ptr<Learner> AccumulatedSamples::clone_unfitted() const {
    return std::make_unique<AccumulatedSamples>(factory_);
}

SampleWeightedMeta::SampleWeightedMeta(WeightPolicy policy, LearnerFactory base_factory)
    : policy_(policy), factory_(std::move(base_factory)), wrapped_(factory_()) {
    if (!wrapped_->supports_sample_weights()) {
        throw std::invalid_argument(
            "SampleWeightedMeta requires a base learner with weighted updates");
    }
}

void SampleWeightedMeta::partial_fit(const Chunk& chunk,
                                     std::span<const std::size_t> declared_classes,
                                     std::span<const double> sample_weights) {
    check_weights(chunk, sample_weights);

    std::vector<double> weights(chunk.size(), 1.0);
    if (policy_ == WeightPolicy::inverse_class_frequency) {
        std::vector<std::size_t> counts;
        for (std::size_t label : chunk.labels()) {
            if (label >= counts.size()) counts.resize(label + 1, 0);
            ++counts[label];
        }
        std::size_t present = 0;
        for (std::size_t count : counts) present += count > 0 ? 1 : 0;
        const double n = static_cast<double>(chunk.size());
        for (std::size_t r = 0; r < chunk.size(); ++r) {
            weights[r] = n / (static_cast<double>(present) *
                              static_cast<double>(counts[chunk.labels()[r]]));
        }
    }
    if (!sample_weights.empty()) {
        for (std::size_t r = 0; r < chunk.size(); ++r) {
            weights[r] *= sample_weights[r];
        }
    }
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("weight policy produced a negative weight");
        }
    }

    last_weights_ = weights;
    wrapped_->partial_fit(chunk, declared_classes, weights);
}

Prediction SampleWeightedMeta::predict(const Matrix& features) const {
    if (!wrapped_->fitted()) {
        throw std::logic_error("predict before the first partial_fit");
    }
    return wrapped_->predict(features);
}

std::unique_ptr<Learner> SampleWeightedMeta::clone_unfitted() const {
    return std::make_unique<SampleWeightedMeta>(policy_, factory_);
}

}  // namespace driftlab
