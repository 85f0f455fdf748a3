#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "driftlab/evaluators.hpp"
#include "driftlab/experiment.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/stream_io.hpp"
#include "driftlab/svg_report.hpp"

namespace {

using namespace driftlab;

/// Pass-through source that tallies per-class label totals.
class CountingSource : public ChunkSource {
public:
    explicit CountingSource(ChunkSource& inner)
        : inner_(inner), totals_(inner.n_classes(), 0) {}

    std::optional<Chunk> next() override {
        auto chunk = inner_.next();
        if (chunk) {
            ++chunks_;
            for (std::size_t label : chunk->labels()) ++totals_[label];
        }
        return chunk;
    }

    std::size_t n_classes() const override { return inner_.n_classes(); }
    std::size_t n_features() const override { return inner_.n_features(); }

    std::size_t chunks() const { return chunks_; }
    const std::vector<std::size_t>& totals() const { return totals_; }

private:
    ChunkSource& inner_;
    std::vector<std::size_t> totals_;
    std::size_t chunks_ = 0;
};

/// Reads a config file consisting of stream.* keys only (the generate
/// subcommand's config flavor).
StreamConfig load_stream_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    StreamConfig config;
    std::string raw;
    std::size_t line_number = 0;
    while (std::getline(in, raw)) {
        ++line_number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::size_t comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        std::string content = raw;
        content.erase(0, content.find_first_not_of(" \t"));
        while (!content.empty() && (content.back() == ' ' || content.back() == '\t')) {
            content.pop_back();
        }
        if (content.empty()) continue;
        const std::size_t equals = content.find('=');
        if (equals == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_number) +
                              ": expected 'key = value'");
        }
        std::string key = content.substr(0, equals);
        std::string value = content.substr(equals + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (key.starts_with("stream.")) key.erase(0, 7);
        try {
            apply_stream_key(config, key, value);
        } catch (const ConfigError& error) {
            throw ConfigError("line " + std::to_string(line_number) + ": " +
                              error.what());
        }
    }
    return config;
}

StreamFormat format_for(const std::string& name, const std::string& path) {
    if (name == "arff") return StreamFormat::arff;
    if (name == "csv") return StreamFormat::csv;
    if (!name.empty()) {
        throw ConfigError("format must be arff or csv, got '" + name + "'");
    }
    return path.ends_with(".csv") ? StreamFormat::csv : StreamFormat::arff;
}

struct GenerateOptions {
    std::string config_path;
    std::string output;
    std::string format;
    std::string drift_type;
    std::string weights;
    std::string y_flip;
    std::string relation = "stream";
};

int cmd_generate(const GenerateOptions& options,
                 const std::map<std::string, std::string>& overrides) {
    StreamConfig config;
    if (!options.config_path.empty()) {
        config = load_stream_config(options.config_path);
    }
    for (const auto& [key, value] : overrides) {
        apply_stream_key(config, key, value);
    }
    if (!options.drift_type.empty()) {
        config.drift_type = parse_drift_type(options.drift_type);
    }
    if (!options.weights.empty()) {
        config.weights = parse_weights(options.weights);
    }
    if (!options.y_flip.empty()) {
        config.y_flip = parse_y_flip(options.y_flip);
    }

    StreamGenerator generator(config);
    CountingSource counting(generator);
    const std::size_t rows =
        write_stream(options.output, counting, format_for(options.format, options.output),
                     options.relation);

    std::cout << "n_chunks: " << config.n_chunks << "\n";
    std::cout << "chunk_size: " << config.chunk_size << "\n";
    std::cout << "rows: " << rows << "\n";
    for (std::size_t c = 0; c < counting.totals().size(); ++c) {
        std::cout << "class " << c << ": " << counting.totals()[c] << "\n";
    }
    return 0;
}

struct InspectOptions {
    std::string path;
    std::size_t chunk_size = 250;
    std::size_t n_classes = 2;
};

int cmd_inspect(const InspectOptions& options) {
    std::unique_ptr<ChunkSource> source;
    if (options.path.ends_with(".csv")) {
        source = std::make_unique<CsvChunkReader>(options.path, options.chunk_size,
                                                  options.n_classes);
    } else {
        source = std::make_unique<ArffChunkReader>(options.path, options.chunk_size);
    }

    const std::size_t n_classes = source->n_classes();
    std::cout << "chunk";
    for (std::size_t c = 0; c < n_classes; ++c) std::cout << "\tclass" << c;
    std::cout << "\tratio\n";

    std::size_t index = 0;
    while (auto chunk = source->next()) {
        ++index;
        std::vector<std::size_t> counts(n_classes, 0);
        for (std::size_t label : chunk->labels()) ++counts[label];
        std::cout << index;
        for (std::size_t count : counts) std::cout << '\t' << count;
        const auto [low, high] = std::minmax_element(counts.begin(), counts.end());
        std::cout << '\t';
        if (*low == 0) {
            std::cout << "inf";
        } else {
            char buffer[32];
            std::snprintf(buffer, sizeof buffer, "%.2f",
                          static_cast<double>(*high) / static_cast<double>(*low));
            std::cout << buffer;
        }
        std::cout << '\n';
    }
    return 0;
}

struct RunOptions {
    std::string config_path;
    std::string scores;
    std::string plot;
    std::string protocol;
    std::string seed;
    std::size_t window_size = 0;
};

int cmd_run(const RunOptions& options) {
    ExperimentConfig config = parse_experiment_config_file(options.config_path);
    if (!options.scores.empty()) config.scores_path = options.scores;
    if (!options.plot.empty()) config.plot_path = options.plot;
    if (!options.protocol.empty()) config.protocol = options.protocol;
    if (options.window_size > 0) config.window_size = options.window_size;
    if (!options.seed.empty()) {
        if (!config.synthetic.has_value()) {
            throw ConfigError("--seed only applies to synthetic streams");
        }
        apply_stream_key(*config.synthetic, "seed", options.seed);
    }
    if (config.protocol != "test_then_train" && config.protocol != "prequential") {
        throw ConfigError("protocol must be test_then_train or prequential, got '" +
                          config.protocol + "'");
    }
    if (config.protocol == "prequential" && config.window_size == 0) {
        throw ConfigError("prequential protocol requires a window size");
    }
    if (config.scores_path.empty()) {
        throw ConfigError("no scores path: set output.scores or pass --scores");
    }

    const ScoreTensor tensor = run_experiment(config);

    std::ofstream scores_out(config.scores_path, std::ios::binary);
    if (!scores_out) {
        throw std::runtime_error("cannot create '" + config.scores_path + "'");
    }
    const std::size_t rows = export_scores(tensor, scores_out);
    std::cout << "scores: " << config.scores_path << " (" << rows << " rows)\n";

    if (config.plot_path.has_value()) {
        write_score_svg(tensor, *config.plot_path);
        std::cout << "plot: " << *config.plot_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic drifting streams and incremental-classifier evaluation"};
    app.require_subcommand(1);

    GenerateOptions generate_options;
    std::map<std::string, std::string> generate_overrides;
    auto* generate = app.add_subcommand("generate", "Generate a stream to a file");
    generate->add_option("--config", generate_options.config_path,
                         "Config file with stream.* keys");
    generate->add_option("-o,--output", generate_options.output, "Output file")
        ->required();
    generate->add_option("--format", generate_options.format,
                         "Output format: arff or csv (default: by extension)");
    generate->add_option("--relation", generate_options.relation,
                         "ARFF relation name");
    const std::pair<const char*, const char*> size_flags[] = {
        {"--n-chunks", "n_chunks"},
        {"--chunk-size", "chunk_size"},
        {"--n-classes", "n_classes"},
        {"--n-features", "n_features"},
        {"--n-informative", "n_informative"},
        {"--n-redundant", "n_redundant"},
        {"--n-repeated", "n_repeated"},
        {"--n-clusters", "n_clusters_per_class"},
        {"--class-sep", "class_sep"},
        {"--n-drifts", "n_drifts"},
        {"--spacing", "concept_sigmoid_spacing"},
        {"--recurring", "recurring"},
        {"--seed", "seed"},
    };
    for (const auto& [flag, key] : size_flags) {
        const std::string target = key;
        generate
            ->add_option_function<std::string>(
                flag,
                [&generate_overrides, target](const std::string& value) {
                    generate_overrides[target] = value;
                },
                "Stream option " + target)
            ->expected(1);
    }
    generate->add_option("--drift-type", generate_options.drift_type,
                         "sudden, gradual, or incremental");
    generate->add_option("--weights", generate_options.weights,
                         "balanced | w0,w1,... | dynamic:<cycles>,<spacing>,<range>");
    generate->add_option("--y-flip", generate_options.y_flip,
                         "Label noise: one proportion or one per class");

    InspectOptions inspect_options;
    auto* inspect = app.add_subcommand("inspect", "Per-chunk class counts of a stream file");
    inspect->add_option("path", inspect_options.path, "ARFF or CSV stream file")
        ->required();
    inspect->add_option("--chunk-size", inspect_options.chunk_size, "Rows per chunk");
    inspect->add_option("--n-classes", inspect_options.n_classes,
                        "Class count (CSV input only)");

    RunOptions run_options;
    auto* run = app.add_subcommand("run", "Run a declarative experiment");
    run->add_option("config", run_options.config_path, "Experiment config file")
        ->required();
    run->add_option("--scores", run_options.scores, "Override output.scores");
    run->add_option("--plot", run_options.plot, "Override output.plot");
    run->add_option("--protocol", run_options.protocol,
                    "Override protocol: test_then_train or prequential");
    run->add_option("--window-size", run_options.window_size,
                    "Override the prequential window size");
    run->add_option("--seed", run_options.seed, "Override the stream seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) return cmd_generate(generate_options, generate_overrides);
        if (inspect->parsed()) return cmd_inspect(inspect_options);
        return cmd_run(run_options);
    } catch (const ConfigError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const EvaluationError& error) {
        std::cerr << "error: " << error.what() << " (classifier " << error.classifier_index()
                  << ", chunk " << error.chunk_index() << ")\n";
        return 1;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
}
