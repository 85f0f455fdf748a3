#include "driftlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "driftlab/ensembles.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/stream_io.hpp"

namespace driftlab {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t");
    return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& text, char separator) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(separator, start);
        parts.push_back(trim(text.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::size_t parse_size(const std::string& text, const std::string& what) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError(what + " expects a non-negative integer, got '" + text + "'");
    }
    return value;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError(what + " expects an unsigned integer, got '" + text + "'");
    }
    return value;
}

double parse_real(const std::string& text, const std::string& what) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError(what + " expects a number, got '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& what) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(what + " expects true or false, got '" + text + "'");
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
    std::vector<double> values;
    for (const std::string& part : split(text, ',')) {
        values.push_back(parse_real(part, what));
    }
    return values;
}

}  // namespace

Weights parse_weights(const std::string& text) {
    if (text == "balanced" || text.empty()) return BalancedWeights{};
    if (text.starts_with("dynamic:")) {
        const auto parts = split(text.substr(8), ',');
        if (parts.size() != 3) {
            throw ConfigError(
                "dynamic weights expect dynamic:<n_cycles>,<spacing>,<range>");
        }
        DynamicImbalance dynamic;
        dynamic.n_cycles = parse_size(parts[0], "weights n_cycles");
        dynamic.sigmoid_spacing = parse_real(parts[1], "weights spacing");
        dynamic.oscillation_range = parse_real(parts[2], "weights range");
        return dynamic;
    }
    return parse_real_list(text, "weights");
}

YFlip parse_y_flip(const std::string& text) {
    const auto values = parse_real_list(text, "y_flip");
    if (values.size() == 1) return values.front();
    return values;
}

DriftType parse_drift_type(const std::string& text) {
    if (text == "sudden") return DriftType::sudden;
    if (text == "gradual") return DriftType::gradual;
    if (text == "incremental") return DriftType::incremental;
    throw ConfigError("drift_type must be sudden, gradual, or incremental, got '" +
                      text + "'");
}

void apply_stream_key(StreamConfig& config, const std::string& key,
                      const std::string& value) {
    if (key == "n_chunks") {
        config.n_chunks = parse_size(value, key);
    } else if (key == "chunk_size") {
        config.chunk_size = parse_size(value, key);
    } else if (key == "n_classes") {
        config.n_classes = parse_size(value, key);
    } else if (key == "n_features") {
        config.n_features = parse_size(value, key);
    } else if (key == "n_informative") {
        config.n_informative = parse_size(value, key);
    } else if (key == "n_redundant") {
        config.n_redundant = parse_size(value, key);
    } else if (key == "n_repeated") {
        config.n_repeated = parse_size(value, key);
    } else if (key == "n_clusters_per_class") {
        config.n_clusters_per_class = parse_size(value, key);
    } else if (key == "class_sep") {
        config.class_sep = parse_real(value, key);
    } else if (key == "n_drifts") {
        config.n_drifts = parse_size(value, key);
    } else if (key == "drift_type") {
        config.drift_type = parse_drift_type(value);
    } else if (key == "concept_sigmoid_spacing") {
        config.concept_sigmoid_spacing = parse_real(value, key);
    } else if (key == "recurring") {
        config.recurring = parse_bool(value, key);
    } else if (key == "y_flip") {
        config.y_flip = parse_y_flip(value);
    } else if (key == "weights") {
        config.weights = parse_weights(value);
    } else if (key == "seed" || key == "random_seed") {
        config.random_seed = parse_u64(value, key);
    } else {
        throw ConfigError("unknown stream key 'stream." + key + "'");
    }
}

namespace {

void apply_line(ExperimentConfig& config, StreamConfig& synthetic,
                bool& synthetic_touched, const std::string& key,
                const std::string& value) {
    if (key.starts_with("stream.")) {
        const std::string sub = key.substr(7);
        if (sub == "path") {
            config.stream_path = value;
        } else if (sub == "file_chunk_size") {
            config.file_chunk_size = parse_size(value, sub);
        } else if (sub == "file_n_classes") {
            config.file_n_classes = parse_size(value, sub);
        } else {
            apply_stream_key(synthetic, sub, value);
            synthetic_touched = true;
        }
        return;
    }
    if (key.starts_with("classifiers[")) {
        const std::size_t close = key.find(']');
        if (close == std::string::npos || close + 1 >= key.size() ||
            key[close + 1] != '.') {
            throw ConfigError("malformed classifier key '" + key + "'");
        }
        const std::size_t index =
            parse_size(key.substr(12, close - 12), "classifier index");
        if (index >= config.classifiers.size()) {
            config.classifiers.resize(index + 1);
        }
        const std::string sub = key.substr(close + 2);
        if (sub == "name") {
            config.classifiers[index].name = value;
        } else if (sub == "kind") {
            config.classifiers[index].kind = value;
        } else {
            config.classifiers[index].params[sub] = value;
        }
        return;
    }
    if (key == "metrics") {
        config.metric_names = split(value, ',');
        return;
    }
    if (key == "protocol.name") {
        config.protocol = value;
        return;
    }
    if (key == "protocol.window_size") {
        config.window_size = parse_size(value, key);
        return;
    }
    if (key == "output.scores") {
        config.scores_path = value;
        return;
    }
    if (key == "output.plot") {
        config.plot_path = value;
        return;
    }
    throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig config;
    StreamConfig synthetic;
    bool synthetic_touched = false;

    std::string raw;
    std::size_t line_number = 0;
    while (std::getline(in, raw)) {
        ++line_number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::size_t comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        const std::string content = trim(raw);
        if (content.empty()) continue;
        const std::size_t equals = content.find('=');
        if (equals == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_number) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(content.substr(0, equals));
        const std::string value = trim(content.substr(equals + 1));
        try {
            apply_line(config, synthetic, synthetic_touched, key, value);
        } catch (const ConfigError& error) {
            throw ConfigError("line " + std::to_string(line_number) + ": " +
                              error.what());
        }
    }

    if (config.stream_path.has_value() && synthetic_touched) {
        throw ConfigError("config sets both stream.path and inline stream keys; "
                          "exactly one stream source is allowed");
    }
    if (!config.stream_path.has_value()) {
        config.synthetic = synthetic;
    }

    if (config.classifiers.empty()) {
        throw ConfigError("config declares no classifiers");
    }
    for (std::size_t i = 0; i < config.classifiers.size(); ++i) {
        ClassifierSpec& spec = config.classifiers[i];
        if (spec.kind.empty()) {
            throw ConfigError("classifiers[" + std::to_string(i) + "] has no kind");
        }
        if (spec.name.empty()) spec.name = spec.kind;
        for (std::size_t j = 0; j < i; ++j) {
            if (config.classifiers[j].name == spec.name) {
                throw ConfigError("duplicate classifier name '" + spec.name + "'");
            }
        }
    }

    if (config.protocol != "test_then_train" && config.protocol != "prequential") {
        throw ConfigError("protocol must be test_then_train or prequential, got '" +
                          config.protocol + "'");
    }
    if (config.protocol == "prequential" && config.window_size == 0) {
        throw ConfigError("prequential protocol requires protocol.window_size");
    }
    return config;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_experiment_config(in);
}

const std::vector<std::string>& valid_classifier_kinds() {
    static const std::vector<std::string> kinds = {
        "gnb",  "accumulated",    "sample_weighted", "sea",
        "oob",  "online_bagging", "uob",             "wae"};
    return kinds;
}

const std::vector<std::string>& valid_metric_names() {
    static const std::vector<std::string> names = {
        "accuracy",  "balanced_accuracy", "recall",
        "precision", "specificity",       "f1",
        "geometric_mean_1", "geometric_mean_2"};
    return names;
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const std::string& item : items) {
        if (!out.empty()) out += ", ";
        out += item;
    }
    return out;
}

class ParamTable {
public:
    ParamTable(const ClassifierSpec& spec) : spec_(spec) {}

    std::size_t size(const std::string& key, std::size_t fallback) {
        used_.push_back(key);
        const auto found = spec_.params.find(key);
        return found == spec_.params.end() ? fallback
                                           : parse_size(found->second, key);
    }

    double real(const std::string& key, double fallback) {
        used_.push_back(key);
        const auto found = spec_.params.find(key);
        return found == spec_.params.end() ? fallback
                                           : parse_real(found->second, key);
    }

    std::string text(const std::string& key, const std::string& fallback) {
        used_.push_back(key);
        const auto found = spec_.params.find(key);
        return found == spec_.params.end() ? fallback : found->second;
    }

    void finish() const {
        for (const auto& [key, value] : spec_.params) {
            if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
                throw ConfigError("classifier '" + spec_.name +
                                  "' has unknown parameter '" + key +
                                  "' (known: " + join(used_) + ")");
            }
        }
    }

private:
    const ClassifierSpec& spec_;
    std::vector<std::string> used_;
};

}  // namespace

std::unique_ptr<Learner> make_classifier(const ClassifierSpec& spec) {
    ParamTable params(spec);
    std::unique_ptr<Learner> learner;
    if (spec.kind == "gnb") {
        learner = std::make_unique<GaussianNB>();
    } else if (spec.kind == "accumulated") {
        learner = std::make_unique<AccumulatedSamples>();
    } else if (spec.kind == "sample_weighted") {
        const std::string policy = params.text("policy", "inverse_class_frequency");
        if (policy == "uniform") {
            learner = std::make_unique<SampleWeightedMeta>(WeightPolicy::uniform);
        } else if (policy == "inverse_class_frequency") {
            learner = std::make_unique<SampleWeightedMeta>(
                WeightPolicy::inverse_class_frequency);
        } else {
            throw ConfigError("classifier '" + spec.name +
                              "': policy must be uniform or inverse_class_frequency");
        }
    } else if (spec.kind == "sea") {
        learner = std::make_unique<SEA>(params.size("max_pool_size", 10));
    } else if (spec.kind == "online_bagging") {
        learner = std::make_unique<OnlineBagging>(params.size("n_members", 10),
                                                  gaussian_nb_factory(),
                                                  params.size("seed", 42));
    } else if (spec.kind == "oob" || spec.kind == "uob") {
        const auto variant = spec.kind == "oob" ? ResamplingVariant::oversample
                                                : ResamplingVariant::undersample;
        learner = std::make_unique<ResampledBagging>(
            variant, params.size("n_members", 10), gaussian_nb_factory(),
            params.size("seed", 42), params.real("decay", 0.9),
            params.real("lambda_cap", 100.0));
    } else if (spec.kind == "wae") {
        learner = std::make_unique<WAE>(params.size("max_pool_size", 10),
                                        gaussian_nb_factory(),
                                        params.real("age_decay", 0.95));
    } else {
        throw ConfigError("unknown classifier kind '" + spec.kind +
                          "' (valid: " + join(valid_classifier_kinds()) + ")");
    }
    params.finish();
    return learner;
}

NamedMetric resolve_metric(const std::string& name) {
    using LabelSpan = std::span<const std::size_t>;
    static const std::map<std::string, double (*)(LabelSpan, LabelSpan)> table = {
        {"accuracy", &metrics::accuracy},
        {"balanced_accuracy", &metrics::balanced_accuracy},
        {"recall", &metrics::recall},
        {"precision", &metrics::precision},
        {"specificity", &metrics::specificity},
        {"f1", &metrics::f1},
        {"geometric_mean_1", &metrics::geometric_mean_1},
        {"geometric_mean_2", &metrics::geometric_mean_2},
    };
    const auto found = table.find(name);
    if (found == table.end()) {
        throw ConfigError("unknown metric '" + name +
                          "' (valid: " + join(valid_metric_names()) + ")");
    }
    return {name, found->second};
}

std::unique_ptr<ChunkSource> open_stream(const ExperimentConfig& config) {
    if (config.stream_path.has_value()) {
        const std::string& path = *config.stream_path;
        if (path.ends_with(".csv")) {
            return std::make_unique<CsvChunkReader>(path, config.file_chunk_size,
                                                    config.file_n_classes);
        }
        return std::make_unique<ArffChunkReader>(path, config.file_chunk_size);
    }
    if (!config.synthetic.has_value()) {
        throw ConfigError("config has no stream source");
    }
    return std::make_unique<StreamGenerator>(*config.synthetic);
}

ScoreTensor run_experiment(const ExperimentConfig& config) {
    auto stream = open_stream(config);

    std::vector<NamedLearner> classifiers;
    for (const ClassifierSpec& spec : config.classifiers) {
        classifiers.push_back({spec.name, make_classifier(spec)});
    }

    std::vector<NamedMetric> metrics;
    for (const std::string& name : config.metric_names) {
        metrics.push_back(resolve_metric(name));
    }

    if (config.protocol == "prequential") {
        return prequential(*stream, classifiers, config.window_size, metrics);
    }
    return test_then_train(*stream, classifiers, metrics);
}

}  // namespace driftlab
