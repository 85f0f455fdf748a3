#ifndef DRIFTLAB_ENSEMBLES_HPP
#define DRIFTLAB_ENSEMBLES_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <random>

#include "driftlab/learners.hpp"

namespace driftlab {

/// Weighted soft vote over fitted members: support = sum of w_j * support_j
/// normalized by the weight sum; all-zero weights fall back to uniform;
/// argmax ties break toward the lower class index. Members without support
/// contribute a one-hot vote. Throws std::logic_error when no member is
/// fitted.
Prediction weighted_predict(std::span<const Learner* const> members,
                            std::span<const double> weights, const Matrix& features,
                            std::span<const std::size_t> declared_classes);

/// Chunk metric used for member scoring inside ensembles:
/// (true labels, predicted labels) -> quality in [0,1].
using ChunkMetric =
    std::function<double(std::span<const std::size_t>, std::span<const std::size_t>)>;

/// Streaming Ensemble Algorithm: one fresh base model per chunk; when the
/// pool overflows, every member (the newest included) is scored on the
/// current chunk and the single worst is dropped, ties removing the oldest.
/// Prediction is an unweighted average of member supports.
class SEA : public Learner {
public:
    explicit SEA(std::size_t max_pool_size = 10,
                 LearnerFactory base_factory = gaussian_nb_factory(),
                 ChunkMetric quality = {});

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                     std::span<const double> sample_weights = {}) override;
    Prediction predict(const Matrix& features) const override;
    std::unique_ptr<Learner> clone_unfitted() const override;
    bool fitted() const override { return !pool_.empty(); }

    std::size_t pool_size() const { return pool_.size(); }
    std::size_t max_pool_size() const { return max_pool_size_; }

private:
    struct Member {
        std::unique_ptr<Learner> learner;
        std::size_t joined;
    };

    std::size_t max_pool_size_;
    LearnerFactory factory_;
    ChunkMetric quality_;
    std::vector<Member> pool_;
    std::vector<std::size_t> declared_;
    std::size_t fits_ = 0;
};

/// Per-member replication count for one instance given the resampling rate
/// lambda. The default draws Poisson(lambda); tests may substitute a
/// constant.
using DrawPolicy = std::function<std::size_t(std::mt19937_64&, double)>;

DrawPolicy poisson_draw_policy();

/// Online Bagging: n members created unfitted up front; each instance
/// updates each member K ~ Poisson(1) times, realized as one weighted
/// partial_fit per member per chunk (weight K, zeros skipped by weight).
class OnlineBagging : public Learner {
public:
    explicit OnlineBagging(std::size_t n_members = 10,
                           LearnerFactory base_factory = gaussian_nb_factory(),
                           std::uint64_t seed = 42, DrawPolicy draw = {});

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                     std::span<const double> sample_weights = {}) override;
    Prediction predict(const Matrix& features) const override;
    std::unique_ptr<Learner> clone_unfitted() const override;
    bool fitted() const override;

    std::size_t n_members() const { return members_.size(); }
    const Learner& member(std::size_t index) const { return *members_[index]; }

private:
    LearnerFactory factory_;
    std::uint64_t seed_;
    DrawPolicy draw_;
    std::vector<std::unique_ptr<Learner>> members_;
    std::vector<std::size_t> declared_;
    std::mt19937_64 engine_;
};

enum class ResamplingVariant { oversample, undersample };

/// Oversampling / Undersampling Online Bagging for binary streams. Per
/// instance of class c the time-decayed class sizes are updated first,
/// w_k <- decay * w_k + (1 - decay) * [c == k], and the resampling rate
/// lambda follows: OOB boosts minority instances by w_other / w_c (capped);
/// UOB damps majority instances by w_other / w_c. Everything else matches
/// OnlineBagging.
class ResampledBagging : public Learner {
public:
    explicit ResampledBagging(ResamplingVariant variant, std::size_t n_members = 10,
                              LearnerFactory base_factory = gaussian_nb_factory(),
                              std::uint64_t seed = 42, double decay = 0.9,
                              double lambda_cap = 100.0, DrawPolicy draw = {});

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                     std::span<const double> sample_weights = {}) override;
    Prediction predict(const Matrix& features) const override;
    std::unique_ptr<Learner> clone_unfitted() const override;
    bool fitted() const override;

    ResamplingVariant variant() const { return variant_; }
    double decay() const { return decay_; }

    /// Time-decayed class sizes (w_0, w_1); they always sum to 1.
    const std::array<double, 2>& class_sizes() const { return class_sizes_; }

    /// Called with (class index, lambda) after each per-instance lambda
    /// computation; for tests and diagnostics.
    void set_lambda_observer(std::function<void(std::size_t, double)> observer);

private:
    double lambda_for(std::size_t label) const;

    ResamplingVariant variant_;
    double decay_;
    double lambda_cap_;
    LearnerFactory factory_;
    std::uint64_t seed_;
    DrawPolicy draw_;
    std::vector<std::unique_ptr<Learner>> members_;
    std::vector<std::size_t> declared_;
    std::mt19937_64 engine_;
    std::array<double, 2> class_sizes_{0.5, 0.5};
    std::function<void(std::size_t, double)> lambda_observer_;
};

/// Weighted Aging Ensemble: per chunk a candidate is trained, all members
/// plus the candidate are scored by mean per-class recall, base weights are
/// the scores' margin over random guessing, members age geometrically, and
/// the smallest aged weight is pruned past the pool cap (ties drop the
/// oldest). Prediction is the weighted soft vote.
class WAE : public Learner {
public:
    explicit WAE(std::size_t max_pool_size = 10,
                 LearnerFactory base_factory = gaussian_nb_factory(),
                 double age_decay = 0.95);

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                     std::span<const double> sample_weights = {}) override;
    Prediction predict(const Matrix& features) const override;
    std::unique_ptr<Learner> clone_unfitted() const override;
    bool fitted() const override { return !pool_.empty(); }

    std::size_t pool_size() const { return pool_.size(); }
    std::size_t max_pool_size() const { return max_pool_size_; }

    /// Aged member weights from the latest update, pool-ordered.
    std::vector<double> member_weights() const;

    /// Ages (chunks since joining) of the members, pool-ordered.
    std::vector<std::size_t> member_ages() const;

private:
    struct Member {
        std::unique_ptr<Learner> learner;
        std::size_t joined;
        double weight;
    };

    std::size_t max_pool_size_;
    LearnerFactory factory_;
    double age_decay_;
    std::vector<Member> pool_;
    std::vector<std::size_t> declared_;
    std::size_t fits_ = 0;
};

/// Mean per-class recall over the classes present in `truth`; for binary
/// chunks with both classes this is the balanced accuracy.
double mean_class_recall(std::span<const std::size_t> truth,
                         std::span<const std::size_t> predicted);

}  // namespace driftlab

#endif  // DRIFTLAB_ENSEMBLES_HPP
