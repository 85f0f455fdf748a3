#ifndef DRIFTLAB_DATAMODEL_HPP
#define DRIFTLAB_DATAMODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace driftlab {

/// Dense row-major matrix of doubles. The workhorse container for feature
/// blocks and per-class score tables; deliberately minimal.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// One batch of labeled samples. Immutable after construction; safe to share
/// across threads.
class Chunk {
public:
    /// Throws std::invalid_argument if the label count does not match the
    /// feature row count or any feature value is not finite.
    Chunk(Matrix features, std::vector<std::size_t> labels);

    const Matrix& features() const { return features_; }
    const std::vector<std::size_t>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    std::size_t n_features() const { return features_.cols(); }

    bool operator==(const Chunk& other) const = default;

private:
    Matrix features_;
    std::vector<std::size_t> labels_;
};

enum class DriftType { sudden, gradual, incremental };

/// Balanced class priors (the default).
struct BalancedWeights {
    bool operator==(const BalancedWeights&) const = default;
};

/// Oscillating class-1 prior: n_cycles full oscillations over the stream,
/// sigmoid-shaped with the given spacing, within a band of the given width
/// centered at 0.5. Binary streams only.
struct DynamicImbalance {
    std::size_t n_cycles = 1;
    double sigmoid_spacing = 999.0;
    double oscillation_range = 1.0;

    bool operator==(const DynamicImbalance&) const = default;
};

/// Either balanced, a static per-class proportion vector, or a dynamic
/// oscillation of the binary class prior.
using Weights = std::variant<BalancedWeights, std::vector<double>, DynamicImbalance>;

/// Label-noise proportion: one value for the whole chunk or one per class.
using YFlip = std::variant<double, std::vector<double>>;

/// Full declarative description of a synthetic stream.
struct StreamConfig {
    std::size_t n_chunks = 250;
    std::size_t chunk_size = 200;
    std::size_t n_classes = 2;
    std::size_t n_features = 20;
    std::size_t n_informative = 2;
    std::size_t n_redundant = 2;
    std::size_t n_repeated = 0;
    std::size_t n_clusters_per_class = 2;
    double class_sep = 1.0;          // hypercube half-side scale
    std::size_t n_drifts = 0;
    DriftType drift_type = DriftType::sudden;
    double concept_sigmoid_spacing = 999.0;
    bool recurring = false;
    YFlip y_flip = 0.01;
    Weights weights = BalancedWeights{};
    std::uint64_t random_seed = 42;

    std::size_t total_instances() const { return n_chunks * chunk_size; }
};

/// Result of validate_config: an empty violation list means the config is ok.
struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every StreamConfig invariant and returns all violations, not just
/// the first. Violations are data, not faults: this never throws.
ValidationResult validate_config(const StreamConfig& config);

/// Binary confusion counts; the positive class is label 1 throughout.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Labels predicted for one feature block, with optional per-class scores
/// (rows sum to 1).
struct Prediction {
    std::vector<std::size_t> labels;
    std::optional<Matrix> support;
};

/// Three-dimensional results array indexed [classifier, evaluation step,
/// metric], with name-addressable first and third axes.
class ScoreTensor {
public:
    ScoreTensor() = default;
    ScoreTensor(std::vector<std::string> classifier_names,
                std::size_t n_steps,
                std::vector<std::string> metric_names);

    std::size_t n_classifiers() const { return classifier_names_.size(); }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_metrics() const { return metric_names_.size(); }

    double& at(std::size_t classifier, std::size_t step, std::size_t metric);
    double at(std::size_t classifier, std::size_t step, std::size_t metric) const;

    /// The scores of one classifier under one metric across all evaluation
    /// steps, by position.
    std::vector<double> series(std::size_t classifier, std::size_t metric) const;
    /// Same column selected by name. Throws std::out_of_range for unknown
    /// names.
    std::vector<double> series(const std::string& classifier_name,
                               const std::string& metric_name) const;

    const std::vector<std::string>& classifier_names() const { return classifier_names_; }
    const std::vector<std::string>& metric_names() const { return metric_names_; }

    std::size_t classifier_index(const std::string& name) const;
    std::size_t metric_index(const std::string& name) const;

private:
    std::vector<std::string> classifier_names_;
    std::vector<std::string> metric_names_;
    std::size_t n_steps_ = 0;
    std::vector<double> values_;
};

/// Anything that can hand out chunks in stream order: the synthetic
/// generator and the file readers all implement this.
class ChunkSource {
public:
    virtual ~ChunkSource() = default;

    /// The next chunk, or nullopt once the stream is exhausted.
    virtual std::optional<Chunk> next() = 0;

    /// Number of classes the stream declares; labels are < this.
    virtual std::size_t n_classes() const = 0;

    /// Feature count of every chunk the stream emits.
    virtual std::size_t n_features() const = 0;
};

/// ChunkSource over a pre-materialized chunk list.
class VectorChunkSource : public ChunkSource {
public:
    VectorChunkSource(std::vector<Chunk> chunks, std::size_t n_classes)
        : chunks_(std::move(chunks)), n_classes_(n_classes) {}

    std::optional<Chunk> next() override {
        if (position_ >= chunks_.size()) return std::nullopt;
        return chunks_[position_++];
    }

    std::size_t n_classes() const override { return n_classes_; }
    std::size_t n_features() const override {
        return chunks_.empty() ? 0 : chunks_.front().n_features();
    }

    void rewind() { position_ = 0; }

private:
    std::vector<Chunk> chunks_;
    std::size_t n_classes_ = 2;
    std::size_t position_ = 0;
};

}  // namespace driftlab

#endif  // DRIFTLAB_DATAMODEL_HPP
