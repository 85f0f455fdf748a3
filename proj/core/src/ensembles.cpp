#include "driftlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftlab/metrics.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

namespace {

constexpr std::uint64_t kBaggingChannel = 0x62616767ULL;

std::size_t position_of(std::span<const std::size_t> declared, std::size_t label) {
    for (std::size_t i = 0; i < declared.size(); ++i) {
        if (declared[i] == label) return i;
    }
    throw std::invalid_argument("label " + std::to_string(label) + " not declared");
}

/// Adds one member's vote (scaled by weight) into the support accumulator,
/// expanding label-only predictions to one-hot votes.
void accumulate_support(Matrix& accumulator, const Prediction& prediction,
                        double weight, std::span<const std::size_t> declared) {
    if (prediction.support.has_value() &&
        prediction.support->cols() == declared.size()) {
        const Matrix& support = *prediction.support;
        for (std::size_t r = 0; r < accumulator.rows(); ++r) {
            for (std::size_t c = 0; c < accumulator.cols(); ++c) {
                accumulator(r, c) += weight * support(r, c);
            }
        }
    } else {
        for (std::size_t r = 0; r < accumulator.rows(); ++r) {
            accumulator(r, position_of(declared, prediction.labels[r])) += weight;
        }
    }
}

void fit_member_weighted(Learner& member, const Chunk& chunk,
                         std::span<const std::size_t> declared,
                         std::span<const double> weights) {
    if (member.supports_sample_weights()) {
        member.partial_fit(chunk, declared, weights);
        return;
    }
    // Fallback for weight-blind bases: replicate each row round(w) times.
    std::vector<double> values;
    std::vector<std::size_t> labels;
    for (std::size_t r = 0; r < chunk.size(); ++r) {
        const auto repeats = static_cast<std::size_t>(std::llround(weights[r]));
        const auto row = chunk.features().row(r);
        for (std::size_t k = 0; k < repeats; ++k) {
            values.insert(values.end(), row.begin(), row.end());
            labels.push_back(chunk.labels()[r]);
        }
    }
    if (labels.empty()) return;
    Matrix features(labels.size(), chunk.n_features());
    std::copy(values.begin(), values.end(), features.data().begin());
    member.partial_fit(Chunk(std::move(features), std::move(labels)), declared);
}

}  // namespace

Prediction weighted_predict(std::span<const Learner* const> members,
                            std::span<const double> weights, const Matrix& features,
                            std::span<const std::size_t> declared_classes) {
    std::vector<const Learner*> fitted;
    std::vector<double> fitted_weights;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i]->fitted()) {
            fitted.push_back(members[i]);
            fitted_weights.push_back(weights.empty() ? 1.0 : weights[i]);
        }
    }
    if (fitted.empty()) {
        throw std::logic_error("predict before the first partial_fit");
    }

    double weight_sum = 0.0;
    for (double w : fitted_weights) weight_sum += w;
    if (weight_sum <= 0.0) {
        std::fill(fitted_weights.begin(), fitted_weights.end(), 1.0);
        weight_sum = static_cast<double>(fitted_weights.size());
    }

    Matrix support(features.rows(), declared_classes.size());
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        accumulate_support(support, fitted[i]->predict(features), fitted_weights[i],
                           declared_classes);
    }

    Prediction prediction;
    prediction.labels.resize(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 0; c < declared_classes.size(); ++c) {
            support(r, c) /= weight_sum;
            if (support(r, c) > support(r, best)) best = c;
        }
        prediction.labels[r] = declared_classes[best];
    }
    prediction.support = std::move(support);
    return prediction;
}

double mean_class_recall(std::span<const std::size_t> truth,
                         std::span<const std::size_t> predicted) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("label vectors differ in length");
    }
    std::vector<std::size_t> totals;
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= totals.size()) {
            totals.resize(truth[i] + 1, 0);
            hits.resize(truth[i] + 1, 0);
        }
        ++totals[truth[i]];
        if (predicted[i] == truth[i]) ++hits[truth[i]];
    }
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < totals.size(); ++c) {
        if (totals[c] == 0) continue;
        sum += static_cast<double>(hits[c]) / static_cast<double>(totals[c]);
        ++present;
    }
    return present > 0 ? sum / static_cast<double>(present) : 0.0;
}

SEA::SEA(std::size_t max_pool_size, LearnerFactory base_factory, ChunkMetric quality)
    : max_pool_size_(max_pool_size), factory_(std::move(base_factory)),
      quality_(std::move(quality)) {
    if (max_pool_size_ == 0) {
        throw std::invalid_argument("max_pool_size must be positive");
    }
    if (!quality_) {
        quality_ = [](std::span<const std::size_t> truth,
                      std::span<const std::size_t> predicted) {
            return metrics::accuracy(truth, predicted);
        };
    }
}

void SEA::partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                      std::span<const double> sample_weights) {
    (void)sample_weights;
    if (declared_.empty()) {
        declared_.assign(declared_classes.begin(), declared_classes.end());
    }
    auto fresh = factory_();
    fresh->partial_fit(chunk, declared_classes);
    pool_.push_back(Member{std::move(fresh), fits_});
    ++fits_;

    if (pool_.size() > max_pool_size_) {
        std::size_t worst = 0;
        double worst_quality = std::numeric_limits<double>::infinity();
        std::size_t worst_joined = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < pool_.size(); ++i) {
            const Prediction prediction = pool_[i].learner->predict(chunk.features());
            const double quality = quality_(chunk.labels(), prediction.labels);
            // Ties remove the oldest among the tied members.
            if (quality < worst_quality ||
                (quality == worst_quality && pool_[i].joined < worst_joined)) {
                worst = i;
                worst_quality = quality;
                worst_joined = pool_[i].joined;
            }
        }
        pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(worst));
    }
}

Prediction SEA::predict(const Matrix& features) const {
    std::vector<const Learner*> members;
    for (const Member& member : pool_) members.push_back(member.learner.get());
    return weighted_predict(members, {}, features, declared_);
}

std::unique_ptr<Learner> SEA::clone_unfitted() const {
    return std::make_unique<SEA>(max_pool_size_, factory_, quality_);
}

DrawPolicy poisson_draw_policy() {
    return [](std::mt19937_64& engine, double lambda) {
        return rng::poisson_draw(engine, lambda);
    };
}

OnlineBagging::OnlineBagging(std::size_t n_members, LearnerFactory base_factory,
                             std::uint64_t seed, DrawPolicy draw)
    : factory_(std::move(base_factory)), seed_(seed), draw_(std::move(draw)),
      engine_(rng::channel_seed(seed, kBaggingChannel)) {
    if (n_members == 0) {
        throw std::invalid_argument("n_members must be positive");
    }
    if (!draw_) draw_ = poisson_draw_policy();
    members_.reserve(n_members);
    for (std::size_t i = 0; i < n_members; ++i) {
        members_.push_back(factory_());
    }
}

void OnlineBagging::partial_fit(const Chunk& chunk,
                                std::span<const std::size_t> declared_classes,
                                std::span<const double> sample_weights) {
    (void)sample_weights;
    if (declared_.empty()) {
        declared_.assign(declared_classes.begin(), declared_classes.end());
    }

    // K draws per (instance, member), instance-major, realized as one
    // weighted update per member per chunk.
    Matrix member_weights(members_.size(), chunk.size());
    for (std::size_t r = 0; r < chunk.size(); ++r) {
        for (std::size_t m = 0; m < members_.size(); ++m) {
            member_weights(m, r) = static_cast<double>(draw_(engine_, 1.0));
        }
    }

    for (std::size_t m = 0; m < members_.size(); ++m) {
        const auto weights = member_weights.row(m);
        const bool any = std::any_of(weights.begin(), weights.end(),
                                     [](double w) { return w > 0.0; });
        if (!any) continue;
        fit_member_weighted(*members_[m], chunk, declared_classes, weights);
    }
}

Prediction OnlineBagging::predict(const Matrix& features) const {
    std::vector<const Learner*> members;
    for (const auto& member : members_) members.push_back(member.get());
    return weighted_predict(members, {}, features, declared_);
}

std::unique_ptr<Learner> OnlineBagging::clone_unfitted() const {
    return std::make_unique<OnlineBagging>(members_.size(), factory_, seed_, draw_);
}

bool OnlineBagging::fitted() const {
    return std::any_of(members_.begin(), members_.end(),
                       [](const auto& member) { return member->fitted(); });
}

ResampledBagging::ResampledBagging(ResamplingVariant variant, std::size_t n_members,
                                   LearnerFactory base_factory, std::uint64_t seed,
                                   double decay, double lambda_cap, DrawPolicy draw)
    : variant_(variant), decay_(decay), lambda_cap_(lambda_cap),
      factory_(std::move(base_factory)), seed_(seed), draw_(std::move(draw)),
      engine_(rng::channel_seed(seed, kBaggingChannel)) {
    if (n_members == 0) {
        throw std::invalid_argument("n_members must be positive");
    }
    if (!(decay_ > 0.0 && decay_ < 1.0)) {
        throw std::invalid_argument("decay must lie in (0,1)");
    }
    if (!(lambda_cap_ >= 1.0)) {
        throw std::invalid_argument("lambda_cap must be at least 1");
    }
    if (!draw_) draw_ = poisson_draw_policy();
    members_.reserve(n_members);
    for (std::size_t i = 0; i < n_members; ++i) {
        members_.push_back(factory_());
    }
}

void ResampledBagging::set_lambda_observer(
    std::function<void(std::size_t, double)> observer) {
    lambda_observer_ = std::move(observer);
}

double ResampledBagging::lambda_for(std::size_t label) const {
    const double own = class_sizes_[label];
    const double other = class_sizes_[1 - label];
    if (variant_ == ResamplingVariant::oversample) {
        if (own < other) {
            return own > 0.0 ? std::min(other / own, lambda_cap_) : lambda_cap_;
        }
        return 1.0;
    }
    if (own > other) {
        return other / own;
    }
    return 1.0;
}

void ResampledBagging::partial_fit(const Chunk& chunk,
                                   std::span<const std::size_t> declared_classes,
                                   std::span<const double> sample_weights) {
    (void)sample_weights;
    if (declared_.empty()) {
        if (declared_classes.size() != 2) {
            throw std::invalid_argument("OOB/UOB require binary streams");
        }
        declared_.assign(declared_classes.begin(), declared_classes.end());
    }
    for (std::size_t label : chunk.labels()) {
        if (label > 1) {
            throw std::invalid_argument("OOB/UOB require binary labels");
        }
    }

    Matrix member_weights(members_.size(), chunk.size());
    for (std::size_t r = 0; r < chunk.size(); ++r) {
        const std::size_t label = chunk.labels()[r];
        // Class-size update happens before the lambda for this instance.
        for (std::size_t k = 0; k < 2; ++k) {
            class_sizes_[k] = decay_ * class_sizes_[k] +
                              (1.0 - decay_) * (label == k ? 1.0 : 0.0);
        }
        const double lambda = lambda_for(label);
        if (lambda_observer_) lambda_observer_(label, lambda);
        for (std::size_t m = 0; m < members_.size(); ++m) {
            member_weights(m, r) = static_cast<double>(draw_(engine_, lambda));
        }
    }

    for (std::size_t m = 0; m < members_.size(); ++m) {
        const auto weights = member_weights.row(m);
        const bool any = std::any_of(weights.begin(), weights.end(),
                                     [](double w) { return w > 0.0; });
        if (!any) continue;
        fit_member_weighted(*members_[m], chunk, declared_classes, weights);
    }
}

Prediction ResampledBagging::predict(const Matrix& features) const {
    std::vector<const Learner*> members;
    for (const auto& member : members_) members.push_back(member.get());
    return weighted_predict(members, {}, features, declared_);
}

std::unique_ptr<Learner> ResampledBagging::clone_unfitted() const {
    return std::make_unique<ResampledBagging>(variant_, members_.size(), factory_,
                                              seed_, decay_, lambda_cap_, draw_);
}

bool ResampledBagging::fitted() const {
    return std::any_of(members_.begin(), members_.end(),
                       [](const auto& member) { return member->fitted(); });
}

WAE::WAE(std::size_t max_pool_size, LearnerFactory base_factory, double age_decay)
    : max_pool_size_(max_pool_size), factory_(std::move(base_factory)),
      age_decay_(age_decay) {
    if (max_pool_size_ == 0) {
        throw std::invalid_argument("max_pool_size must be positive");
    }
    if (!(age_decay_ > 0.0 && age_decay_ <= 1.0)) {
        throw std::invalid_argument("age_decay must lie in (0,1]");
    }
}

void WAE::partial_fit(const Chunk& chunk, std::span<const std::size_t> declared_classes,
                      std::span<const double> sample_weights) {
    (void)sample_weights;
    if (declared_.empty()) {
        declared_.assign(declared_classes.begin(), declared_classes.end());
    }
    const double chance = 1.0 / static_cast<double>(declared_.size());

    auto candidate = factory_();
    candidate->partial_fit(chunk, declared_classes);

    // Score pool members and the candidate on the current chunk; weight is
    // the margin over random guessing, aged geometrically.
    for (Member& member : pool_) {
        const Prediction prediction = member.learner->predict(chunk.features());
        const double quality = mean_class_recall(chunk.labels(), prediction.labels);
        const double base = std::max(0.0, quality - chance);
        const std::size_t age = fits_ - member.joined;
        member.weight = base * std::pow(age_decay_, static_cast<double>(age));
    }
    {
        const Prediction prediction = candidate->predict(chunk.features());
        const double quality = mean_class_recall(chunk.labels(), prediction.labels);
        pool_.push_back(Member{std::move(candidate), fits_,
                               std::max(0.0, quality - chance)});
    }
    ++fits_;

    if (pool_.size() > max_pool_size_) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < pool_.size(); ++i) {
            // Strict comparison keeps the earliest (oldest) of a tie as the
            // removal target.
            if (pool_[i].weight < pool_[worst].weight) worst = i;
        }
        pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(worst));
    }
}

Prediction WAE::predict(const Matrix& features) const {
    std::vector<const Learner*> members;
    std::vector<double> weights;
    for (const Member& member : pool_) {
        members.push_back(member.learner.get());
        weights.push_back(member.weight);
    }
    return weighted_predict(members, weights, features, declared_);
}

std::unique_ptr<Learner> WAE::clone_unfitted() const {
    return std::make_unique<WAE>(max_pool_size_, factory_, age_decay_);
}

std::vector<double> WAE::member_weights() const {
    std::vector<double> weights;
    for (const Member& member : pool_) weights.push_back(member.weight);
    return weights;
}

std::vector<std::size_t> WAE::member_ages() const {
    std::vector<std::size_t> ages;
    for (const Member& member : pool_) ages.push_back(fits_ - 1 - member.joined);
    return ages;
}

}  // namespace driftlab
