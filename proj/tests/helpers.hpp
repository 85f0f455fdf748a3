#ifndef DRIFTLAB_TESTS_HELPERS_HPP
#define DRIFTLAB_TESTS_HELPERS_HPP

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "driftlab/learners.hpp"

namespace testutil {

using driftlab::Chunk;
using driftlab::Learner;
using driftlab::Matrix;
using driftlab::Prediction;

inline Chunk make_chunk(const std::vector<std::vector<double>>& rows,
                        const std::vector<std::size_t>& labels) {
    Matrix features(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            features(r, c) = rows[r][c];
        }
    }
    return Chunk(std::move(features), labels);
}

/// Two well-separated gaussian blobs; the standard little dataset for
/// learner tests.
inline Chunk two_blob_chunk(std::size_t rows_per_class, std::uint64_t seed,
                            std::size_t n_features = 4, double separation = 3.0) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix features(rows_per_class * 2, n_features);
    std::vector<std::size_t> labels(rows_per_class * 2);
    for (std::size_t r = 0; r < rows_per_class * 2; ++r) {
        const std::size_t label = r % 2;
        labels[r] = label;
        const double center = label == 0 ? -separation : separation;
        for (std::size_t f = 0; f < n_features; ++f) {
            features(r, f) = center + noise(engine);
        }
    }
    return Chunk(std::move(features), labels);
}

/// Independent per-sample counting implementations of the binary metrics,
/// written against the definitions rather than the library code.
struct OracleCounts {
    double tp = 0, fp = 0, fn = 0, tn = 0;
};

inline OracleCounts oracle_counts(const std::vector<std::size_t>& y,
                                  const std::vector<std::size_t>& y_pred) {
    OracleCounts counts;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1 && y_pred[i] == 1) counts.tp += 1;
        if (y[i] == 0 && y_pred[i] == 1) counts.fp += 1;
        if (y[i] == 1 && y_pred[i] == 0) counts.fn += 1;
        if (y[i] == 0 && y_pred[i] == 0) counts.tn += 1;
    }
    return counts;
}

inline double oracle_ratio(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

inline double oracle_recall(const OracleCounts& c) {
    return oracle_ratio(c.tp, c.tp + c.fn);
}
inline double oracle_precision(const OracleCounts& c) {
    return oracle_ratio(c.tp, c.tp + c.fp);
}
inline double oracle_specificity(const OracleCounts& c) {
    return oracle_ratio(c.tn, c.tn + c.fp);
}
inline double oracle_f1(const OracleCounts& c) {
    const double p = oracle_precision(c);
    const double r = oracle_recall(c);
    return oracle_ratio(2.0 * p * r, p + r);
}
inline double oracle_bac(const OracleCounts& c) {
    return (oracle_recall(c) + oracle_specificity(c)) / 2.0;
}
inline double oracle_gmean1(const OracleCounts& c) {
    return std::sqrt(oracle_recall(c) * oracle_specificity(c));
}
inline double oracle_gmean2(const OracleCounts& c) {
    return std::sqrt(oracle_recall(c) * oracle_precision(c));
}

/// Weighted two-pass batch moments for one feature column subset.
struct BatchMoments {
    double weight = 0.0;
    std::vector<double> mean;
    std::vector<double> variance;
};

inline BatchMoments batch_moments(const std::vector<std::vector<double>>& rows,
                                  const std::vector<double>& weights) {
    BatchMoments result;
    if (rows.empty()) return result;
    const std::size_t n_features = rows.front().size();
    result.mean.assign(n_features, 0.0);
    result.variance.assign(n_features, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        result.weight += weights[r];
        for (std::size_t f = 0; f < n_features; ++f) {
            result.mean[f] += weights[r] * rows[r][f];
        }
    }
    if (result.weight == 0.0) return result;
    for (double& m : result.mean) m /= result.weight;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t f = 0; f < n_features; ++f) {
            const double d = rows[r][f] - result.mean[f];
            result.variance[f] += weights[r] * d * d;
        }
    }
    for (double& v : result.variance) v /= result.weight;
    return result;
}

/// Predicts a fixed class with a one-hot support row.
class ConstantLearner : public Learner {
public:
    ConstantLearner(std::size_t label, std::size_t n_classes)
        : label_(label), n_classes_(n_classes) {}

    void partial_fit(const Chunk&, std::span<const std::size_t>,
                     std::span<const double> = {}) override {
        fitted_ = true;
    }

    Prediction predict(const Matrix& features) const override {
        if (!fitted_) throw std::logic_error("predict before the first partial_fit");
        Prediction prediction;
        prediction.labels.assign(features.rows(), label_);
        Matrix support(features.rows(), n_classes_);
        for (std::size_t r = 0; r < features.rows(); ++r) support(r, label_) = 1.0;
        prediction.support = std::move(support);
        return prediction;
    }

    std::unique_ptr<Learner> clone_unfitted() const override {
        return std::make_unique<ConstantLearner>(label_, n_classes_);
    }

    bool fitted() const override { return fitted_; }

private:
    std::size_t label_;
    std::size_t n_classes_;
    bool fitted_ = false;
};

/// Returns the same support row for every input row.
class StubSupportLearner : public Learner {
public:
    explicit StubSupportLearner(std::vector<double> support_row)
        : support_row_(std::move(support_row)) {}

    void partial_fit(const Chunk&, std::span<const std::size_t>,
                     std::span<const double> = {}) override {
        fitted_ = true;
    }

    Prediction predict(const Matrix& features) const override {
        if (!fitted_) throw std::logic_error("predict before the first partial_fit");
        Prediction prediction;
        Matrix support(features.rows(), support_row_.size());
        for (std::size_t r = 0; r < features.rows(); ++r) {
            std::size_t best = 0;
            for (std::size_t c = 0; c < support_row_.size(); ++c) {
                support(r, c) = support_row_[c];
                if (support_row_[c] > support_row_[best]) best = c;
            }
            prediction.labels.push_back(best);
        }
        prediction.support = std::move(support);
        return prediction;
    }

    std::unique_ptr<Learner> clone_unfitted() const override {
        return std::make_unique<StubSupportLearner>(support_row_);
    }

    bool fitted() const override { return fitted_; }

private:
    std::vector<double> support_row_;
    bool fitted_ = false;
};

/// Records the interleaving of fit and predict calls. Chunks are identified
/// by their (0,0) feature cell, so tests mark chunks with distinct values
/// there.
class RecordingLearner : public Learner {
public:
    struct Event {
        std::string kind;
        double chunk_tag;
        std::vector<double> weights;
    };

    RecordingLearner(std::shared_ptr<std::vector<Event>> log, bool supports_weights)
        : log_(std::move(log)), supports_weights_(supports_weights) {}

    void partial_fit(const Chunk& chunk, std::span<const std::size_t>,
                     std::span<const double> weights = {}) override {
        log_->push_back(
            {"fit", chunk.features()(0, 0), {weights.begin(), weights.end()}});
        fitted_ = true;
    }

    Prediction predict(const Matrix& features) const override {
        if (!fitted_) throw std::logic_error("predict before the first partial_fit");
        log_->push_back({"predict", features(0, 0), {}});
        Prediction prediction;
        prediction.labels.assign(features.rows(), 0);
        return prediction;
    }

    std::unique_ptr<Learner> clone_unfitted() const override {
        return std::make_unique<RecordingLearner>(log_, supports_weights_);
    }

    bool supports_sample_weights() const override { return supports_weights_; }
    bool fitted() const override { return fitted_; }

private:
    std::shared_ptr<std::vector<Event>> log_;
    bool supports_weights_;
    bool fitted_ = false;
};

/// Replays the true labels of a materialized stream: predict call i returns
/// the labels of chunk i+1, exactly the chunk Test-Then-Train evaluates at
/// step i.
class OracleLearner : public Learner {
public:
    explicit OracleLearner(std::vector<Chunk> chunks) : chunks_(std::move(chunks)) {}

    void partial_fit(const Chunk&, std::span<const std::size_t>,
                     std::span<const double> = {}) override {
        fitted_ = true;
    }

    Prediction predict(const Matrix&) const override {
        if (!fitted_) throw std::logic_error("predict before the first partial_fit");
        Prediction prediction;
        prediction.labels = chunks_.at(predicts_ + 1).labels();
        ++predicts_;
        return prediction;
    }

    std::unique_ptr<Learner> clone_unfitted() const override {
        return std::make_unique<OracleLearner>(chunks_);
    }

    bool fitted() const override { return fitted_; }

private:
    std::vector<Chunk> chunks_;
    mutable std::size_t predicts_ = 0;
    bool fitted_ = false;
};

/// Throws on the nth partial_fit call (0-based), for fault-coordinate tests.
class ThrowingLearner : public Learner {
public:
    explicit ThrowingLearner(std::size_t fail_on_fit) : fail_on_fit_(fail_on_fit) {}

    void partial_fit(const Chunk&, std::span<const std::size_t>,
                     std::span<const double> = {}) override {
        if (fits_ == fail_on_fit_) throw std::runtime_error("synthetic learner fault");
        ++fits_;
        fitted_ = true;
    }

    Prediction predict(const Matrix& features) const override {
        if (!fitted_) throw std::logic_error("predict before the first partial_fit");
        Prediction prediction;
        prediction.labels.assign(features.rows(), 0);
        return prediction;
    }

    std::unique_ptr<Learner> clone_unfitted() const override {
        return std::make_unique<ThrowingLearner>(fail_on_fit_);
    }

    bool fitted() const override { return fitted_; }

private:
    std::size_t fail_on_fit_;
    std::size_t fits_ = 0;
    bool fitted_ = false;
};

/// GaussianNB wrapper that reports its destruction, for pool-pruning tests.
class TrackedGNB : public Learner {
public:
    TrackedGNB(std::size_t id, std::shared_ptr<std::set<std::size_t>> graveyard)
        : id_(id), graveyard_(std::move(graveyard)) {}

    ~TrackedGNB() override { graveyard_->insert(id_); }

    void partial_fit(const Chunk& chunk, std::span<const std::size_t> declared,
                     std::span<const double> weights = {}) override {
        inner_.partial_fit(chunk, declared, weights);
    }

    Prediction predict(const Matrix& features) const override {
        return inner_.predict(features);
    }

    std::unique_ptr<Learner> clone_unfitted() const override {
        return std::make_unique<TrackedGNB>(id_, graveyard_);
    }

    bool supports_sample_weights() const override { return true; }
    bool fitted() const override { return inner_.fitted(); }

    std::size_t id() const { return id_; }

private:
    std::size_t id_;
    std::shared_ptr<std::set<std::size_t>> graveyard_;
    driftlab::GaussianNB inner_;
};

inline std::vector<Chunk> materialize(driftlab::ChunkSource& source) {
    std::vector<Chunk> chunks;
    while (auto chunk = source.next()) chunks.push_back(std::move(*chunk));
    return chunks;
}

class TempDir {
public:
    TempDir() {
        std::string name = (std::filesystem::temp_directory_path() /
                            "driftlab-test-XXXXXX").string();
        if (!mkdtemp(name.data())) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = name;
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    std::string file(const std::string& name) const {
        return (std::filesystem::path(path_) / name).string();
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

#ifdef DRIFTLAB_CLI_PATH
inline CliResult run_cli(const std::string& args, const TempDir& dir) {
    const std::string out_path = dir.file("cli-stdout.txt");
    const std::string err_path = dir.file("cli-stderr.txt");
    const std::string command = std::string(DRIFTLAB_CLI_PATH) + " " + args + " > " +
                                out_path + " 2> " + err_path;
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}
#endif

}  // namespace testutil

#endif  // DRIFTLAB_TESTS_HELPERS_HPP
