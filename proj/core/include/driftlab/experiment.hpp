#ifndef DRIFTLAB_EXPERIMENT_HPP
#define DRIFTLAB_EXPERIMENT_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "driftlab/datamodel.hpp"
#include "driftlab/evaluators.hpp"

namespace driftlab {

/// Configuration or lookup failure that should surface as a usage error
/// (exit status 2 in the CLI).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClassifierSpec {
    std::string name;
    std::string kind;
    std::map<std::string, std::string> params;
};

/// One declarative experiment: a stream source (inline synthetic config or
/// a file), classifiers, metrics, a protocol, and output paths.
struct ExperimentConfig {
    std::optional<StreamConfig> synthetic;
    std::optional<std::string> stream_path;
    std::size_t file_chunk_size = 250;
    std::size_t file_n_classes = 2;

    std::vector<ClassifierSpec> classifiers;
    std::vector<std::string> metric_names;

    std::string protocol = "test_then_train";
    std::size_t window_size = 0;

    std::string scores_path;
    std::optional<std::string> plot_path;
};

/// Parses the flat key-value experiment format: one `key = value` pair per
/// line, '#' comments, dotted sections (stream.*, classifiers[i].*,
/// protocol.*, output.*, metrics). Throws ConfigError with the offending
/// line number on unknown keys, malformed values, or inconsistent
/// combinations (both or neither stream source, duplicate classifier names,
/// a prequential protocol without window_size).
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);

/// Value parsers shared by the config reader and the CLI flag layer; all
/// throw ConfigError on malformed input.
Weights parse_weights(const std::string& text);
YFlip parse_y_flip(const std::string& text);
DriftType parse_drift_type(const std::string& text);

/// Applies one `stream.<key> = value` assignment to the config. Unknown
/// keys throw ConfigError naming the key.
void apply_stream_key(StreamConfig& config, const std::string& key,
                      const std::string& value);

const std::vector<std::string>& valid_classifier_kinds();
const std::vector<std::string>& valid_metric_names();

/// Instantiates a classifier from its spec. Unknown kinds or parameters
/// throw ConfigError listing the valid choices.
std::unique_ptr<Learner> make_classifier(const ClassifierSpec& spec);

/// Resolves a metric by name; unknown names throw ConfigError listing the
/// valid names.
NamedMetric resolve_metric(const std::string& name);

/// Opens the configured stream source. The caller owns the source.
std::unique_ptr<ChunkSource> open_stream(const ExperimentConfig& config);

/// Builds stream and classifiers and runs the configured protocol. This is
/// the pure core of cmd_run; writing CSV/SVG stays with the caller.
ScoreTensor run_experiment(const ExperimentConfig& config);

}  // namespace driftlab

#endif  // DRIFTLAB_EXPERIMENT_HPP
