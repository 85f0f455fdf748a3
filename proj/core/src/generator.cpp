#include "driftlab/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "driftlab/rng.hpp"

namespace driftlab {

namespace {

constexpr std::uint64_t kLabelChannel = 0x6c6162656cULL;
constexpr std::uint64_t kDriftChannel = 0x6472696674ULL;
constexpr std::uint64_t kNoiseChannel = 0x6e6f697365ULL;
constexpr std::uint64_t kFlipChannel = 0x666c6970ULL;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double next_normal(std::mt19937_64& engine) {
    return std::normal_distribution<double>(0.0, 1.0)(engine);
}

double next_uniform(std::mt19937_64& engine) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine);
}

std::size_t next_index(std::mt19937_64& engine, std::size_t bound) {
    return std::uniform_int_distribution<std::size_t>(0, bound - 1)(engine);
}

/// Distinct hypercube vertices, one per cluster. Small cubes are enumerated
/// and partially shuffled; large ones are sampled with rejection.
std::vector<std::vector<int>> draw_vertices(std::mt19937_64& engine,
                                            std::size_t n_vertices_needed,
                                            std::size_t dim) {
    std::vector<std::vector<int>> picked;
    picked.reserve(n_vertices_needed);
    if (dim <= 16) {
        const std::size_t all = std::size_t{1} << dim;
        std::vector<std::size_t> codes(all);
        std::iota(codes.begin(), codes.end(), 0);
        for (std::size_t i = 0; i < n_vertices_needed; ++i) {
            const std::size_t j =
                i + std::uniform_int_distribution<std::size_t>(0, all - 1 - i)(engine);
            std::swap(codes[i], codes[j]);
            std::vector<int> vertex(dim);
            for (std::size_t b = 0; b < dim; ++b) {
                vertex[b] = (codes[i] >> b) & 1 ? 1 : -1;
            }
            picked.push_back(std::move(vertex));
        }
    } else {
        std::set<std::vector<int>> seen;
        while (picked.size() < n_vertices_needed) {
            std::vector<int> vertex(dim);
            for (std::size_t b = 0; b < dim; ++b) {
                vertex[b] = std::uniform_int_distribution<int>(0, 1)(engine) ? 1 : -1;
            }
            if (seen.insert(vertex).second) {
                picked.push_back(std::move(vertex));
            }
        }
    }
    return picked;
}

Matrix uniform_matrix(std::mt19937_64& engine, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = dist(engine);
        }
    }
    return m;
}

}  // namespace

void Concept::sample_row(std::size_t class_index, std::size_t cluster,
                         std::span<const double> noise, std::span<const double> filler,
                         std::span<double> out) const {
    const std::size_t row = class_index * n_clusters_per_class + cluster;
    const Matrix& transform = cluster_transforms[row];
    for (std::size_t j = 0; j < n_informative; ++j) {
        double value = centroids(row, j);
        for (std::size_t i = 0; i < n_informative; ++i) {
            value += noise[i] * transform(i, j);
        }
        out[j] = value;
    }
    for (std::size_t q = 0; q < n_redundant; ++q) {
        double value = 0.0;
        for (std::size_t i = 0; i < n_informative; ++i) {
            value += out[i] * redundant_map(i, q);
        }
        out[n_informative + q] = value;
    }
    for (std::size_t t = 0; t < n_repeated; ++t) {
        out[n_informative + n_redundant + t] = out[repeated_indices[t]];
    }
    std::copy(filler.begin(), filler.end(),
              out.begin() + static_cast<std::ptrdiff_t>(n_informative + n_redundant + n_repeated));
}

Concept build_concept(std::uint64_t seed, const StreamConfig& config) {
    const std::size_t n_clusters = config.n_classes * config.n_clusters_per_class;
    if (config.n_informative == 0 ||
        (config.n_informative < 64 &&
         n_clusters > (std::size_t{1} << config.n_informative))) {
        std::ostringstream msg;
        msg << n_clusters << " clusters do not fit on the 2^" << config.n_informative
            << " vertices of the informative hypercube";
        throw std::invalid_argument(msg.str());
    }

    Concept cpt;
    cpt.n_classes = config.n_classes;
    cpt.n_clusters_per_class = config.n_clusters_per_class;
    cpt.n_informative = config.n_informative;
    cpt.n_redundant = config.n_redundant;
    cpt.n_repeated = config.n_repeated;
    cpt.n_features = config.n_features;
    cpt.concept_seed = seed;

    std::mt19937_64 engine(seed);

    const auto vertices = draw_vertices(engine, n_clusters, config.n_informative);
    cpt.centroids = Matrix(n_clusters, config.n_informative);
    for (std::size_t r = 0; r < n_clusters; ++r) {
        for (std::size_t j = 0; j < config.n_informative; ++j) {
            cpt.centroids(r, j) = config.class_sep * vertices[r][j];
        }
    }

    cpt.cluster_transforms.reserve(n_clusters);
    for (std::size_t r = 0; r < n_clusters; ++r) {
        cpt.cluster_transforms.push_back(
            uniform_matrix(engine, config.n_informative, config.n_informative));
    }
    cpt.redundant_map = uniform_matrix(engine, config.n_informative, config.n_redundant);

    cpt.repeated_indices.resize(config.n_repeated);
    const std::size_t source_columns = config.n_informative + config.n_redundant;
    for (std::size_t t = 0; t < config.n_repeated; ++t) {
        cpt.repeated_indices[t] = next_index(engine, source_columns);
    }
    return cpt;
}

Matrix sample_concept(const Concept& cpt, std::size_t class_index,
                      std::size_t count, std::mt19937_64& engine) {
    if (class_index >= cpt.n_classes) {
        throw std::invalid_argument("class index out of range");
    }
    Matrix samples(count, cpt.n_features);
    std::vector<double> noise(cpt.n_informative);
    std::vector<double> filler(cpt.n_filler());
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t cluster = next_index(engine, cpt.n_clusters_per_class);
        for (double& z : noise) z = next_normal(engine);
        for (double& z : filler) z = next_normal(engine);
        cpt.sample_row(class_index, cluster, noise, filler, samples.row(r));
    }
    return samples;
}

namespace {

/// Triangular transition phase: -1 at the start of each drift segment, 0 at
/// its center, +1 at its end. Recurring schedules flip the direction of
/// every odd segment.
double drift_phase(const DriftSchedule& schedule, std::size_t instance_index,
                   std::size_t& segment) {
    const double x = static_cast<double>(instance_index) /
                     static_cast<double>(schedule.total_instances);
    segment = std::min(static_cast<std::size_t>(x * static_cast<double>(schedule.n_drifts)),
                       schedule.n_drifts - 1);
    const double local = x * static_cast<double>(schedule.n_drifts) -
                         static_cast<double>(segment);
    double s = 2.0 * local - 1.0;
    if (schedule.recurring && segment % 2 == 1) s = -s;
    return s;
}

}  // namespace

double drift_probability(const DriftSchedule& schedule, std::size_t instance_index) {
    if (schedule.n_drifts == 0) return 0.0;
    std::size_t segment = 0;
    const double s = drift_phase(schedule, instance_index, segment);
    return sigmoid(schedule.spacing * s);
}

ActiveConcepts active_concepts(const DriftSchedule& schedule, std::size_t instance_index) {
    if (schedule.n_drifts == 0) return {0, 0, 0.0};
    std::size_t segment = 0;
    const double s = drift_phase(schedule, instance_index, segment);
    const double p = sigmoid(schedule.spacing * s);
    if (schedule.recurring) return {0, 1, p};
    return {segment, segment + 1, p};
}

double imbalance_proportion(const ImbalanceSchedule& schedule,
                            std::size_t instance_index, std::size_t total_instances) {
    if (std::holds_alternative<BalancedWeights>(schedule.mode)) {
        return 1.0 / static_cast<double>(schedule.n_classes);
    }
    if (const auto* weights = std::get_if<std::vector<double>>(&schedule.mode)) {
        return (*weights)[1];
    }
    const auto& dynamic = std::get<DynamicImbalance>(schedule.mode);
    const double x = static_cast<double>(instance_index) /
                     static_cast<double>(total_instances);
    double phase = x * static_cast<double>(dynamic.n_cycles);
    phase -= std::floor(phase);
    // Triangular wave: 0 at cycle start and midpoint, +1 and -1 at the
    // quarter points, so the stream opens balanced.
    double u;
    if (phase < 0.25) {
        u = 4.0 * phase;
    } else if (phase < 0.75) {
        u = 2.0 - 4.0 * phase;
    } else {
        u = 4.0 * phase - 4.0;
    }
    const double swing = 2.0 * sigmoid(dynamic.sigmoid_spacing * u) - 1.0;
    return 0.5 + 0.5 * dynamic.oscillation_range * swing;
}

void blend_rows(std::span<const double> from, std::span<const double> to,
                double p, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (1.0 - p) * from[i] + p * to[i];
    }
}

StreamGenerator::StreamGenerator(StreamConfig config) : config_(std::move(config)) {
    const ValidationResult validation = validate_config(config_);
    if (!validation.ok()) {
        std::ostringstream msg;
        msg << "invalid stream config:";
        for (const auto& violation : validation.violations) {
            msg << "\n  - " << violation;
        }
        throw std::invalid_argument(msg.str());
    }

    schedule_.n_drifts = config_.n_drifts;
    schedule_.recurring = config_.recurring;
    schedule_.total_instances = config_.total_instances();
    schedule_.spacing = config_.drift_type == DriftType::sudden
                            ? 999.0
                            : config_.concept_sigmoid_spacing;

    imbalance_.mode = config_.weights;
    imbalance_.n_classes = config_.n_classes;

    const std::size_t n_concepts =
        config_.n_drifts == 0 ? 1 : (config_.recurring ? 2 : config_.n_drifts + 1);
    concepts_.reserve(n_concepts);
    for (std::size_t j = 0; j < n_concepts; ++j) {
        concepts_.push_back(build_concept(config_.random_seed + j, config_));
    }

    reseed();
}

void StreamGenerator::reseed() {
    label_engine_.seed(rng::channel_seed(config_.random_seed, kLabelChannel));
    drift_engine_.seed(rng::channel_seed(config_.random_seed, kDriftChannel));
    noise_engine_.seed(rng::channel_seed(config_.random_seed, kNoiseChannel));
    flip_engine_.seed(rng::channel_seed(config_.random_seed, kFlipChannel));
}

void StreamGenerator::reset() {
    reseed();
    chunks_emitted_ = 0;
    preflip_labels_.clear();
}

std::size_t StreamGenerator::draw_label(std::size_t instance_index) {
    if (std::holds_alternative<BalancedWeights>(imbalance_.mode)) {
        return next_index(label_engine_, config_.n_classes);
    }
    if (const auto* weights = std::get_if<std::vector<double>>(&imbalance_.mode)) {
        const double u = next_uniform(label_engine_);
        double cumulative = 0.0;
        for (std::size_t c = 0; c + 1 < weights->size(); ++c) {
            cumulative += (*weights)[c];
            if (u < cumulative) return c;
        }
        return weights->size() - 1;
    }
    const double p1 =
        imbalance_proportion(imbalance_, instance_index, schedule_.total_instances);
    return next_uniform(label_engine_) < p1 ? 1 : 0;
}

Chunk StreamGenerator::next_chunk() {
    if (chunks_emitted_ >= config_.n_chunks) {
        throw std::logic_error("stream exhausted: all chunks already emitted");
    }

    const std::size_t n = config_.chunk_size;
    Matrix features(n, config_.n_features);
    std::vector<std::size_t> labels(n);

    std::vector<double> noise(config_.n_informative);
    std::vector<double> filler(concepts_[0].n_filler());
    std::vector<double> row_old(config_.n_features);
    std::vector<double> row_new(config_.n_features);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t g = chunks_emitted_ * n + i;
        const std::size_t label = draw_label(g);
        labels[i] = label;

        const ActiveConcepts active = active_concepts(schedule_, g);
        const std::size_t cluster = next_index(noise_engine_, config_.n_clusters_per_class);
        for (double& z : noise) z = next_normal(noise_engine_);
        for (double& z : filler) z = next_normal(noise_engine_);

        auto out = features.row(i);
        if (schedule_.n_drifts == 0) {
            concepts_[0].sample_row(label, cluster, noise, filler, out);
        } else if (config_.drift_type == DriftType::incremental) {
            // Both concepts are sampled against the same noise and cluster
            // choice, so the blend interpolates between corresponding
            // clusters instead of mixing unrelated draws.
            concepts_[active.old_concept].sample_row(label, cluster, noise, filler, row_old);
            concepts_[active.new_concept].sample_row(label, cluster, noise, filler, row_new);
            blend_rows(row_old, row_new, active.probability, out);
        } else {
            const double u = next_uniform(drift_engine_);
            const std::size_t concept_id =
                u < active.probability ? active.new_concept : active.old_concept;
            concepts_[concept_id].sample_row(label, cluster, noise, filler, out);
        }
    }

    preflip_labels_ = labels;
    apply_label_noise(labels);

    ++chunks_emitted_;
    return Chunk(std::move(features), std::move(labels));
}

std::optional<Chunk> StreamGenerator::next() {
    if (chunks_emitted_ >= config_.n_chunks) return std::nullopt;
    return next_chunk();
}

void StreamGenerator::apply_label_noise(std::vector<std::size_t>& labels) {
    const auto invert = [&](std::size_t label) {
        return config_.n_classes == 2 ? 1 - label : (label + 1) % config_.n_classes;
    };

    // Flips a floor(proportion * |candidates|)-sized random subset.
    const auto flip_subset = [&](std::vector<std::size_t>& candidates, double proportion) {
        const std::size_t n_flips =
            static_cast<std::size_t>(proportion * static_cast<double>(candidates.size()));
        for (std::size_t i = 0; i < n_flips; ++i) {
            const std::size_t j =
                i + std::uniform_int_distribution<std::size_t>(
                        0, candidates.size() - 1 - i)(flip_engine_);
            std::swap(candidates[i], candidates[j]);
            labels[candidates[i]] = invert(labels[candidates[i]]);
        }
    };

    if (const auto* single = std::get_if<double>(&config_.y_flip)) {
        if (*single <= 0.0) return;
        std::vector<std::size_t> all(labels.size());
        std::iota(all.begin(), all.end(), 0);
        flip_subset(all, *single);
        return;
    }

    const auto& per_class = std::get<std::vector<double>>(config_.y_flip);
    for (std::size_t c = 0; c < config_.n_classes; ++c) {
        if (per_class[c] <= 0.0) continue;
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (preflip_labels_[i] == c) members.push_back(i);
        }
        flip_subset(members, per_class[c]);
    }
}

}  // namespace driftlab
