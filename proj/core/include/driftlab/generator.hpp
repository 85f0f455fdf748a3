#ifndef DRIFTLAB_GENERATOR_HPP
#define DRIFTLAB_GENERATOR_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "driftlab/datamodel.hpp"

namespace driftlab {

/// One base concept: class clusters placed on distinct vertices of the
/// {-class_sep, +class_sep}^n_informative hypercube, each cluster with its
/// own random linear map, plus fixed recipes for the redundant and repeated
/// columns. A concept is a pure parameter set; all sampling noise comes from
/// outside, so two concepts can be sampled against the same noise vector.
struct Concept {
    std::size_t n_classes = 0;
    std::size_t n_clusters_per_class = 0;
    std::size_t n_informative = 0;
    std::size_t n_redundant = 0;
    std::size_t n_repeated = 0;
    std::size_t n_features = 0;

    /// (n_classes * n_clusters_per_class, n_informative); row c*k+j holds
    /// cluster j of class c.
    Matrix centroids;
    /// One (n_informative, n_informative) map per centroid row.
    std::vector<Matrix> cluster_transforms;
    /// (n_informative, n_redundant) linear-combination matrix.
    Matrix redundant_map;
    /// n_repeated indices into the informative+redundant column block.
    std::vector<std::size_t> repeated_indices;

    std::uint64_t concept_seed = 0;

    std::size_t n_filler() const {
        return n_features - n_informative - n_redundant - n_repeated;
    }

    /// Deterministic sample map: writes one feature row for the given class
    /// and cluster from pre-drawn standard-normal noise. `noise` must have
    /// n_informative entries, `filler` n_filler() entries, `out` n_features.
    /// Informative columns are centroid + noise * transform, redundant
    /// columns are exact linear combinations of the informative ones,
    /// repeated columns copy their source, filler is passed through.
    void sample_row(std::size_t class_index, std::size_t cluster,
                    std::span<const double> noise, std::span<const double> filler,
                    std::span<double> out) const;
};

/// Builds the concept for a given seed. Deterministic: equal (seed, config)
/// yield identical matrices. Throws std::invalid_argument when
/// n_classes * n_clusters_per_class exceeds the 2^n_informative available
/// hypercube vertices.
Concept build_concept(std::uint64_t seed, const StreamConfig& config);

/// Draws `count` rows of the given class: per row a uniformly chosen cluster
/// of that class, standard-normal informative noise and standard-normal
/// filler, consumed from `engine` in that order.
Matrix sample_concept(const Concept& cpt, std::size_t class_index,
                      std::size_t count, std::mt19937_64& engine);

/// Sigmoid-shaped concept-transition schedule over a stream of
/// total_instances samples with n_drifts transitions.
struct DriftSchedule {
    std::size_t n_drifts = 0;
    double spacing = 999.0;
    bool recurring = false;
    std::size_t total_instances = 0;
};

/// New-concept probability at an instance index: the sigmoid of the spacing
/// times a triangular phase with transitions centered at odd multiples of
/// total/(2*n_drifts). Non-recurring segments each ramp 0 -> 1 toward the
/// next concept; recurring segments alternate direction so the stream
/// oscillates between two concepts. Zero drifts yield 0 everywhere.
double drift_probability(const DriftSchedule& schedule, std::size_t instance_index);

struct ActiveConcepts {
    std::size_t old_concept;
    std::size_t new_concept;
    double probability;
};

/// Which pair of concepts is in play at an instance, and the new-concept
/// probability. Non-recurring segment j maps to (j, j+1); recurring streams
/// stay on (0, 1).
ActiveConcepts active_concepts(const DriftSchedule& schedule, std::size_t instance_index);

/// Class-prior schedule: balanced, static per-class weights, or a dynamic
/// binary oscillation.
struct ImbalanceSchedule {
    Weights mode = BalancedWeights{};
    std::size_t n_classes = 2;
};

/// Class-1 proportion at an instance. Dynamic mode follows
/// 0.5 + (range/2) * (2*sigmoid(spacing*u) - 1) with u a triangular wave
/// running n_cycles full cycles over the stream (zero at every cycle start
/// and midpoint, +-1 at the quarter points). Static mode returns the
/// configured class-1 weight; balanced mode 1/n_classes.
double imbalance_proportion(const ImbalanceSchedule& schedule,
                            std::size_t instance_index, std::size_t total_instances);

/// Linear interpolation of two feature rows; used for incremental drift.
/// Every output element lies in the interval hull of its two inputs.
void blend_rows(std::span<const double> from, std::span<const double> to,
                double p, std::span<double> out);

/// Replicable synthetic stream generator. The full stream is a pure
/// function of its StreamConfig, including the seed: label draws, drift
/// noise, feature noise and label flips each run on an independent
/// sub-stream of the root seed, and concept j is built from seed + j.
///
/// Single-owner mutable state; distinct instances may run on distinct
/// threads.
class StreamGenerator : public ChunkSource {
public:
    /// Throws std::invalid_argument listing every config violation when the
    /// config does not validate, or when concept construction is impossible.
    explicit StreamGenerator(StreamConfig config);

    /// Emits the next chunk. Throws std::logic_error once n_chunks chunks
    /// have been emitted.
    Chunk next_chunk();

    /// ChunkSource: next chunk, or nullopt when exhausted.
    std::optional<Chunk> next() override;
    std::size_t n_classes() const override { return config_.n_classes; }
    std::size_t n_features() const override { return config_.n_features; }

    /// Rewinds to chunk 0; re-emission reproduces byte-identical chunks.
    void reset();

    std::size_t chunks_emitted() const { return chunks_emitted_; }
    const StreamConfig& config() const { return config_; }
    const DriftSchedule& drift_schedule() const { return schedule_; }
    const std::vector<Concept>& concepts() const { return concepts_; }

    /// Labels of the most recent chunk before label noise was applied.
    const std::vector<std::size_t>& labels_before_noise() const {
        return preflip_labels_;
    }

private:
    std::size_t draw_label(std::size_t instance_index);
    void apply_label_noise(std::vector<std::size_t>& labels);
    void reseed();

    StreamConfig config_;
    DriftSchedule schedule_;
    ImbalanceSchedule imbalance_;
    std::vector<Concept> concepts_;

    std::mt19937_64 label_engine_;
    std::mt19937_64 drift_engine_;
    std::mt19937_64 noise_engine_;
    std::mt19937_64 flip_engine_;

    std::size_t chunks_emitted_ = 0;
    std::vector<std::size_t> preflip_labels_;
};

}  // namespace driftlab

#endif  // DRIFTLAB_GENERATOR_HPP
