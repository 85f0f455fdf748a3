#ifndef DRIFTLAB_EVALUATORS_HPP
#define DRIFTLAB_EVALUATORS_HPP

#include <deque>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "driftlab/learners.hpp"

namespace driftlab {

/// A chunk-level metric: (true labels, predicted labels) -> value in [0,1].
using MetricFn =
    std::function<double(std::span<const std::size_t>, std::span<const std::size_t>)>;

struct NamedMetric {
    std::string name;
    MetricFn fn;
};

struct NamedLearner {
    std::string name;
    std::unique_ptr<Learner> learner;
};

/// The default metric pair: accuracy and balanced accuracy.
std::vector<NamedMetric> default_metrics();

/// A learner fault during evaluation, annotated with where it happened.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& message, std::size_t classifier_index,
                    std::size_t chunk_index);

    std::size_t classifier_index() const { return classifier_index_; }
    std::size_t chunk_index() const { return chunk_index_; }

private:
    std::size_t classifier_index_;
    std::size_t chunk_index_;
};

/// Sliding sample buffer used by the prequential protocol: holds the most
/// recent `capacity` samples and derives recency weights for the newest
/// chunk.
class SlidingWindow {
public:
    explicit SlidingWindow(std::size_t capacity);

    /// Appends the chunk's samples, evicting the oldest beyond capacity.
    /// Throws std::invalid_argument when the chunk alone exceeds capacity.
    void push_chunk(const Chunk& chunk);

    std::size_t size() const { return labels_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// Training weights for the last pushed chunk of `chunk_rows` samples:
    /// a linear recency profile over the current window length L, weight 1
    /// at the newest sample, dropping to about chunk_rows / L at the window
    /// tail. When the window holds exactly the chunk, every weight is 1, so
    /// the prequential protocol degenerates to Test-Then-Train.
    std::vector<double> recent_chunk_weights(std::size_t chunk_rows) const;

    /// The buffered samples, oldest first, as one chunk.
    Chunk contents() const;

private:
    std::size_t capacity_;
    std::size_t n_features_ = 0;
    std::deque<std::vector<double>> rows_;
    std::deque<std::size_t> labels_;
};

/// Batch Test-Then-Train: chunk 0 trains only; every later chunk is
/// predicted and scored by every classifier before any training on it.
/// Scores land at [classifier, chunk - 1, metric]; the tensor has
/// n_chunks - 1 evaluation steps. Empty `metrics` selects the defaults.
/// Learner faults abort with an EvaluationError carrying coordinates.
ScoreTensor test_then_train(ChunkSource& stream, std::span<NamedLearner> classifiers,
                            std::span<const NamedMetric> metrics = {});

/// Prequential protocol: like Test-Then-Train, but training on each chunk
/// uses per-sample weights from a sliding window of window_size samples
/// (the forgetting mechanism). Classifiers without weighted updates get a
/// plain partial_fit. window_size must be at least the chunk size;
/// window_size == chunk_size reproduces test_then_train exactly.
ScoreTensor prequential(ChunkSource& stream, std::span<NamedLearner> classifiers,
                        std::size_t window_size,
                        std::span<const NamedMetric> metrics = {});

/// Writes the tensor as long CSV (classifier,chunk,metric,value; 9
/// significant digits; chunk is the 1-based evaluated chunk index) and
/// returns the data row count.
std::size_t export_scores(const ScoreTensor& tensor, std::ostream& sink);

}  // namespace driftlab

#endif  // DRIFTLAB_EVALUATORS_HPP
