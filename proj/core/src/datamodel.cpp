#include "driftlab/datamodel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace driftlab {

Chunk::Chunk(Matrix features, std::vector<std::size_t> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
    if (features_.rows() != labels_.size()) {
        std::ostringstream msg;
        msg << "chunk has " << features_.rows() << " feature rows but "
            << labels_.size() << " labels";
        throw std::invalid_argument(msg.str());
    }
    for (double v : features_.data()) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("chunk features must be finite");
        }
    }
}

namespace {

void check_positive(std::vector<std::string>& out, std::size_t value, const char* name) {
    if (value == 0) {
        out.push_back(std::string(name) + " must be positive");
    }
}

}  // namespace

ValidationResult validate_config(const StreamConfig& config) {
    ValidationResult result;
    auto& v = result.violations;

    check_positive(v, config.n_chunks, "n_chunks");
    check_positive(v, config.chunk_size, "chunk_size");
    check_positive(v, config.n_features, "n_features");
    check_positive(v, config.n_clusters_per_class, "n_clusters_per_class");
    if (config.n_classes < 2) {
        v.push_back("n_classes must be at least 2");
    }
    if (config.n_informative + config.n_redundant + config.n_repeated > config.n_features) {
        v.push_back("n_informative + n_redundant + n_repeated must not exceed n_features");
    }
    if (config.n_informative == 0) {
        v.push_back("n_informative must be positive");
    } else if (config.n_informative < 64) {
        // Pigeonhole: every cluster needs its own hypercube vertex.
        const std::size_t clusters = config.n_classes * config.n_clusters_per_class;
        const std::size_t vertices = std::size_t{1} << config.n_informative;
        if (clusters > vertices) {
            v.push_back("n_classes * n_clusters_per_class exceeds the 2^n_informative hypercube vertices");
        }
    }
    if (!(config.class_sep > 0.0)) {
        v.push_back("class_sep must be positive");
    }
    if (!(config.concept_sigmoid_spacing > 0.0)) {
        v.push_back("concept_sigmoid_spacing must be positive");
    }

    if (const auto* flip = std::get_if<double>(&config.y_flip)) {
        if (!(*flip >= 0.0 && *flip < 1.0)) {
            v.push_back("y_flip must lie in [0,1)");
        }
    } else {
        const auto& per_class = std::get<std::vector<double>>(config.y_flip);
        if (per_class.size() != config.n_classes) {
            v.push_back("per-class y_flip must have exactly n_classes entries");
        }
        for (double q : per_class) {
            if (!(q >= 0.0 && q < 1.0)) {
                v.push_back("y_flip proportions must lie in [0,1)");
                break;
            }
        }
    }

    if (const auto* weights = std::get_if<std::vector<double>>(&config.weights)) {
        if (weights->size() != config.n_classes) {
            v.push_back("weights must have exactly n_classes entries");
        }
        double sum = 0.0;
        bool in_range = true;
        for (double w : *weights) {
            sum += w;
            in_range = in_range && w > 0.0 && w < 1.0;
        }
        if (!in_range) {
            v.push_back("each weight must lie in (0,1)");
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            v.push_back("weights must sum to 1");
        }
    } else if (const auto* dynamic = std::get_if<DynamicImbalance>(&config.weights)) {
        if (config.n_classes != 2) {
            v.push_back("dynamic imbalance requires n_classes = 2");
        }
        if (dynamic->n_cycles == 0) {
            v.push_back("n_cycles must be positive");
        }
        if (!(dynamic->sigmoid_spacing > 0.0)) {
            v.push_back("imbalance sigmoid_spacing must be positive");
        }
        if (!(dynamic->oscillation_range > 0.0 && dynamic->oscillation_range <= 1.0)) {
            v.push_back("oscillation range must lie in (0,1]");
        }
    }

    return result;
}

ScoreTensor::ScoreTensor(std::vector<std::string> classifier_names,
                         std::size_t n_steps,
                         std::vector<std::string> metric_names)
    : classifier_names_(std::move(classifier_names)),
      metric_names_(std::move(metric_names)),
      n_steps_(n_steps),
      values_(classifier_names_.size() * n_steps_ * metric_names_.size(), 0.0) {}

double& ScoreTensor::at(std::size_t classifier, std::size_t step, std::size_t metric) {
    return values_[(classifier * n_steps_ + step) * metric_names_.size() + metric];
}

double ScoreTensor::at(std::size_t classifier, std::size_t step, std::size_t metric) const {
    return values_[(classifier * n_steps_ + step) * metric_names_.size() + metric];
}

std::vector<double> ScoreTensor::series(std::size_t classifier, std::size_t metric) const {
    if (classifier >= n_classifiers() || metric >= n_metrics()) {
        throw std::out_of_range("score tensor index out of range");
    }
    std::vector<double> column(n_steps_);
    for (std::size_t step = 0; step < n_steps_; ++step) {
        column[step] = at(classifier, step, metric);
    }
    return column;
}

std::vector<double> ScoreTensor::series(const std::string& classifier_name,
                                        const std::string& metric_name) const {
    return series(classifier_index(classifier_name), metric_index(metric_name));
}

std::size_t ScoreTensor::classifier_index(const std::string& name) const {
    for (std::size_t i = 0; i < classifier_names_.size(); ++i) {
        if (classifier_names_[i] == name) return i;
    }
    throw std::out_of_range("unknown classifier name: " + name);
}

std::size_t ScoreTensor::metric_index(const std::string& name) const {
    for (std::size_t i = 0; i < metric_names_.size(); ++i) {
        if (metric_names_[i] == name) return i;
    }
    throw std::out_of_range("unknown metric name: " + name);
}

}  // namespace driftlab
