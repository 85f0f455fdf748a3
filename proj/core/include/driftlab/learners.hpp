#ifndef DRIFTLAB_LEARNERS_HPP
#define DRIFTLAB_LEARNERS_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "driftlab/datamodel.hpp"

namespace driftlab {

/// The incremental-learner contract shared by base classifiers and
/// ensembles. Predict before the first partial_fit is an error; after one
/// fit it succeeds. State is single-owner mutable.
class Learner {
public:
    virtual ~Learner() = default;

    /// Updates the model with one chunk. declared_classes fixes the label
    /// space at the first call; later calls must not introduce new labels
    /// and must pass either the same class list or an empty one.
    /// sample_weights, when non-empty, must match the chunk size and be
    /// non-negative; learners that do not support weights ignore them.
    virtual void partial_fit(const Chunk& chunk,
                             std::span<const std::size_t> declared_classes,
                             std::span<const double> sample_weights = {}) = 0;

    /// Predicts labels (and per-class support) for each feature row.
    /// Throws std::logic_error before the first partial_fit.
    virtual Prediction predict(const Matrix& features) const = 0;

    /// A fresh, unfitted learner of the same kind and configuration.
    virtual std::unique_ptr<Learner> clone_unfitted() const = 0;

    virtual bool supports_sample_weights() const { return false; }
    virtual bool fitted() const = 0;
};

using LearnerFactory = std::function<std::unique_ptr<Learner>()>;

/// The default base-learner factory: an unfitted GaussianNB.
LearnerFactory gaussian_nb_factory();

/// Streaming Gaussian naive Bayes over weighted per-class feature moments.
/// Chunk updates merge into running moments with a numerically stable
/// parallel combination, so chunk order never matters (to 1e-9) and an
/// unweighted call equals all weights 1.
class GaussianNB : public Learner {
public:
    GaussianNB() = default;

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                     std::span<const double> sample_weights = {}) override;
    Prediction predict(const Matrix& features) const override;
    std::unique_ptr<Learner> clone_unfitted() const override;
    bool supports_sample_weights() const override { return true; }
    bool fitted() const override { return fitted_; }

    const std::vector<std::size_t>& declared_classes() const { return declared_; }

    /// Inspection by declared-class position; variances are population
    /// variances (M2 / weight).
    double class_weight(std::size_t class_position) const;
    double mean(std::size_t class_position, std::size_t feature) const;
    double variance(std::size_t class_position, std::size_t feature) const;
    double prior(std::size_t class_position) const;

private:
    struct ClassMoments {
        double weight = 0.0;
        std::vector<double> mean;
        std::vector<double> m2;
    };

    std::size_t class_position(std::size_t label) const;

    std::vector<std::size_t> declared_;
    std::vector<ClassMoments> classes_;
    std::size_t n_features_ = 0;
    bool fitted_ = false;
};

/// Meta-learner that buffers every chunk seen and refits a fresh base model
/// on the full concatenation at each update. Its chunk-k model is exactly a
/// one-shot model trained on chunks 1..k.
class AccumulatedSamples : public Learner {
public:
    explicit AccumulatedSamples(LearnerFactory base_factory = gaussian_nb_factory());

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                     std::span<const double> sample_weights = {}) override;
    Prediction predict(const Matrix& features) const override;
    std::unique_ptr<Learner> clone_unfitted() const override;
    bool fitted() const override { return model_ != nullptr; }

    std::size_t buffered_rows() const { return buffered_labels_.size(); }

private:
    LearnerFactory factory_;
    std::vector<double> buffered_values_;
    std::vector<std::size_t> buffered_labels_;
    std::size_t n_features_ = 0;
    std::vector<std::size_t> declared_;
    std::unique_ptr<Learner> model_;
};

enum class WeightPolicy { uniform, inverse_class_frequency };

/// Wraps a weight-capable learner and derives per-sample weights from a
/// policy at each update. inverse_class_frequency weights samples by
/// n / (k * count_class) over the k classes present in the chunk, so a
/// single-class chunk gets weight 1. Caller-provided weights multiply the
/// policy weights.
class SampleWeightedMeta : public Learner {
public:
    explicit SampleWeightedMeta(WeightPolicy policy = WeightPolicy::inverse_class_frequency,
                                LearnerFactory base_factory = gaussian_nb_factory());

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                     std::span<const double> sample_weights = {}) override;
    Prediction predict(const Matrix& features) const override;
    std::unique_ptr<Learner> clone_unfitted() const override;
    bool supports_sample_weights() const override { return true; }
    bool fitted() const override { return wrapped_->fitted(); }

    WeightPolicy policy() const { return policy_; }

    /// The weights the policy produced at the latest update, for inspection.
    const std::vector<double>& last_weights() const { return last_weights_; }

private:
    WeightPolicy policy_;
    LearnerFactory factory_;
    std::unique_ptr<Learner> wrapped_;
    std::vector<double> last_weights_;
};

}  // namespace driftlab

#endif  // DRIFTLAB_LEARNERS_HPP
