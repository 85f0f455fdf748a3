#include <doctest.h>

#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "driftlab/ensembles.hpp"
#include "driftlab/experiment.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/stream_io.hpp"
#include "driftlab/svg_report.hpp"
#include "helpers.hpp"

using namespace driftlab;
using testutil::read_file;
using testutil::TempDir;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_config(in);
}

std::string parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& error) {
        return error.what();
    }
    return {};
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

StreamConfig small_stream(std::uint64_t seed) {
    StreamConfig config;
    config.n_chunks = 20;
    config.chunk_size = 80;
    config.n_features = 5;
    config.n_informative = 2;
    config.n_redundant = 2;
    config.class_sep = 2.0;
    config.n_drifts = 1;
    config.drift_type = DriftType::sudden;
    config.random_seed = seed;
    return config;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("a full config file parses into every section") {
    const ExperimentConfig config = parse(
        "# synthetic drift experiment\n"
        "stream.n_chunks = 40\n"
        "stream.chunk_size = 100\n"
        "stream.n_features = 8\n"
        "stream.n_informative = 4\n"
        "stream.n_drifts = 2\n"
        "stream.drift_type = gradual\n"
        "stream.concept_sigmoid_spacing = 5\n"
        "stream.recurring = true\n"
        "stream.y_flip = 0.05\n"
        "stream.weights = 0.3, 0.7\n"
        "stream.seed = 77\n"
        "\n"
        "classifiers[0].kind = gnb\n"
        "classifiers[0].name = baseline\n"
        "classifiers[1].kind = sea\n"
        "classifiers[1].max_pool_size = 7   # pool cap\n"
        "\n"
        "metrics = accuracy, f1\n"
        "protocol.name = prequential\n"
        "protocol.window_size = 300\n"
        "output.scores = scores.csv\n"
        "output.plot = scores.svg\n");

    REQUIRE(config.synthetic.has_value());
    CHECK_FALSE(config.stream_path.has_value());
    const StreamConfig& stream = *config.synthetic;
    CHECK(stream.n_chunks == 40);
    CHECK(stream.chunk_size == 100);
    CHECK(stream.n_features == 8);
    CHECK(stream.n_informative == 4);
    CHECK(stream.n_drifts == 2);
    CHECK(stream.drift_type == DriftType::gradual);
    CHECK(stream.concept_sigmoid_spacing == 5.0);
    CHECK(stream.recurring);
    CHECK(std::get<double>(stream.y_flip) == 0.05);
    CHECK(std::get<std::vector<double>>(stream.weights) ==
          std::vector<double>{0.3, 0.7});
    CHECK(stream.random_seed == 77);

    REQUIRE(config.classifiers.size() == 2);
    CHECK(config.classifiers[0].name == "baseline");
    CHECK(config.classifiers[0].kind == "gnb");
    CHECK(config.classifiers[0].params.empty());
    CHECK(config.classifiers[1].name == "sea");
    CHECK(config.classifiers[1].params.at("max_pool_size") == "7");

    CHECK(config.metric_names == std::vector<std::string>{"accuracy", "f1"});
    CHECK(config.protocol == "prequential");
    CHECK(config.window_size == 300);
    CHECK(config.scores_path == "scores.csv");
    CHECK(config.plot_path == "scores.svg");
}

TEST_CASE("a minimal config falls back to the documented defaults") {
    const ExperimentConfig config = parse(
        "classifiers[0].kind = gnb\n"
        "output.scores = out.csv\n");
    REQUIRE(config.synthetic.has_value());
    CHECK(config.protocol == "test_then_train");
    CHECK(config.window_size == 0);
    CHECK(config.file_chunk_size == 250);
    CHECK(config.file_n_classes == 2);
    CHECK(config.metric_names.empty());
    CHECK_FALSE(config.plot_path.has_value());
    CHECK(config.classifiers[0].name == "gnb");
}

TEST_CASE("config errors carry the offending line number") {
    CHECK(parse_error("classifiers[0].kind = gnb\nstream.bogus = 3\n") ==
          "line 2: unknown stream key 'stream.bogus'");
    CHECK(parse_error("just some words\n") == "line 1: expected 'key = value'");
    CHECK(parse_error("nonsense.key = 1\n") ==
          "line 1: unknown config key 'nonsense.key'");
    CHECK(parse_error("stream.n_chunks = abc\n").find("non-negative integer") !=
          std::string::npos);
    CHECK(parse_error("classifiers[0] = gnb\n").find("malformed classifier key") !=
          std::string::npos);
}

TEST_CASE("config consistency rules are enforced") {
    CHECK(parse_error("stream.path = data.arff\n"
                      "stream.n_chunks = 5\n"
                      "classifiers[0].kind = gnb\n")
              .find("exactly one stream source") != std::string::npos);
    CHECK(parse_error("stream.n_chunks = 5\n") == "config declares no classifiers");
    CHECK(parse_error("classifiers[0].kind = gnb\n"
                      "classifiers[1].kind = gnb\n")
              .find("duplicate classifier name 'gnb'") != std::string::npos);
    CHECK(parse_error("classifiers[0].name = alpha\n")
              .find("classifiers[0] has no kind") != std::string::npos);
    CHECK(parse_error("classifiers[0].kind = gnb\n"
                      "protocol.name = prequential\n")
              .find("requires protocol.window_size") != std::string::npos);
    CHECK(parse_error("classifiers[0].kind = gnb\n"
                      "protocol.name = holdout\n")
              .find("protocol must be test_then_train or prequential") !=
          std::string::npos);
}

TEST_CASE("parse_weights handles all three weight families") {
    CHECK(std::holds_alternative<BalancedWeights>(parse_weights("balanced")));
    CHECK(std::get<std::vector<double>>(parse_weights("0.4,0.6")) ==
          std::vector<double>{0.4, 0.6});

    const auto dynamic = std::get<DynamicImbalance>(parse_weights("dynamic:3,5.0,0.8"));
    CHECK(dynamic.n_cycles == 3);
    CHECK(dynamic.sigmoid_spacing == 5.0);
    CHECK(dynamic.oscillation_range == 0.8);

    CHECK_THROWS_AS(parse_weights("dynamic:3,5.0"), ConfigError);
    CHECK_THROWS_AS(parse_weights("abc"), ConfigError);
}

TEST_CASE("parse_y_flip distinguishes scalar and per-class forms") {
    CHECK(std::get<double>(parse_y_flip("0.1")) == 0.1);
    CHECK(std::get<std::vector<double>>(parse_y_flip("0.1,0.2")) ==
          std::vector<double>{0.1, 0.2});
    CHECK_THROWS_AS(parse_y_flip("lots"), ConfigError);
}

TEST_CASE("parse_drift_type accepts exactly the three drift kinds") {
    CHECK(parse_drift_type("sudden") == DriftType::sudden);
    CHECK(parse_drift_type("gradual") == DriftType::gradual);
    CHECK(parse_drift_type("incremental") == DriftType::incremental);
    CHECK_THROWS_WITH_AS(parse_drift_type("abrupt"),
                         doctest::Contains("must be sudden, gradual, or incremental"),
                         ConfigError);
}

TEST_CASE("apply_stream_key maps keys onto the stream config") {
    StreamConfig config;
    apply_stream_key(config, "n_classes", "4");
    apply_stream_key(config, "n_clusters_per_class", "2");
    apply_stream_key(config, "class_sep", "2.5");
    apply_stream_key(config, "n_repeated", "1");
    apply_stream_key(config, "random_seed", "99");
    CHECK(config.n_classes == 4);
    CHECK(config.n_clusters_per_class == 2);
    CHECK(config.class_sep == 2.5);
    CHECK(config.n_repeated == 1);
    CHECK(config.random_seed == 99);
    CHECK_THROWS_WITH_AS(apply_stream_key(config, "sigma", "1"),
                         doctest::Contains("unknown stream key 'stream.sigma'"),
                         ConfigError);
}

TEST_CASE("make_classifier builds every advertised kind") {
    for (const std::string& kind : valid_classifier_kinds()) {
        ClassifierSpec spec{kind, kind, {}};
        const auto learner = make_classifier(spec);
        REQUIRE(learner != nullptr);
        CHECK_FALSE(learner->fitted());
    }

    ClassifierSpec sea_spec{"s", "sea", {{"max_pool_size", "7"}}};
    const auto sea = make_classifier(sea_spec);
    CHECK(dynamic_cast<SEA*>(sea.get())->max_pool_size() == 7);

    ClassifierSpec oob_spec{"o", "oob", {{"n_members", "3"}, {"decay", "0.8"}}};
    const auto oob = make_classifier(oob_spec);
    const auto* resampled = dynamic_cast<ResampledBagging*>(oob.get());
    REQUIRE(resampled != nullptr);
    CHECK(resampled->variant() == ResamplingVariant::oversample);
    CHECK(resampled->decay() == 0.8);

    ClassifierSpec uob_spec{"u", "uob", {}};
    CHECK(dynamic_cast<ResampledBagging*>(make_classifier(uob_spec).get())->variant() ==
          ResamplingVariant::undersample);

    ClassifierSpec wae_spec{"w", "wae", {{"age_decay", "0.9"}}};
    CHECK(dynamic_cast<WAE*>(make_classifier(wae_spec).get()) != nullptr);
}

TEST_CASE("make_classifier rejects unknown kinds and parameters") {
    ClassifierSpec unknown{"x", "hoeffding_tree", {}};
    CHECK_THROWS_WITH_AS(make_classifier(unknown),
                         doctest::Contains("unknown classifier kind 'hoeffding_tree'"),
                         ConfigError);
    try {
        make_classifier(unknown);
    } catch (const ConfigError& error) {
        // The error names the valid alternatives.
        CHECK(std::string(error.what()).find("gnb") != std::string::npos);
        CHECK(std::string(error.what()).find("wae") != std::string::npos);
    }

    ClassifierSpec bad_param{"s", "sea", {{"pool", "3"}}};
    CHECK_THROWS_WITH_AS(make_classifier(bad_param),
                         doctest::Contains("unknown parameter 'pool'"), ConfigError);

    ClassifierSpec bad_policy{"m", "sample_weighted", {{"policy", "magic"}}};
    CHECK_THROWS_AS(make_classifier(bad_policy), ConfigError);
}

TEST_CASE("resolve_metric covers the advertised names and rejects others") {
    for (const std::string& name : valid_metric_names()) {
        const NamedMetric metric = resolve_metric(name);
        CHECK(metric.name == name);
        const std::vector<std::size_t> y{0, 1, 1, 0};
        const double value = metric.fn(y, y);
        CHECK(value == 1.0);
    }
    CHECK_THROWS_WITH_AS(resolve_metric("auc"),
                         doctest::Contains("unknown metric 'auc'"), ConfigError);
    try {
        resolve_metric("auc");
    } catch (const ConfigError& error) {
        CHECK(std::string(error.what()).find("geometric_mean_2") != std::string::npos);
    }
}

TEST_CASE("open_stream picks the source from the config") {
    ExperimentConfig synthetic;
    synthetic.synthetic = small_stream(5);
    CHECK(dynamic_cast<StreamGenerator*>(open_stream(synthetic).get()) != nullptr);

    TempDir dir;
    StreamGenerator source(small_stream(5));
    write_stream(dir.file("stream.csv"), source, StreamFormat::csv);
    ExperimentConfig csv;
    csv.stream_path = dir.file("stream.csv");
    csv.file_chunk_size = 80;
    CHECK(dynamic_cast<CsvChunkReader*>(open_stream(csv).get()) != nullptr);

    StreamGenerator arff_source(small_stream(5));
    write_stream(dir.file("stream.arff"), arff_source, StreamFormat::arff);
    ExperimentConfig arff;
    arff.stream_path = dir.file("stream.arff");
    CHECK(dynamic_cast<ArffChunkReader*>(open_stream(arff).get()) != nullptr);

    ExperimentConfig empty;
    CHECK_THROWS_AS(open_stream(empty), ConfigError);
}

TEST_CASE("run_experiment reproduces a hand-assembled evaluation") {
    ExperimentConfig config;
    config.synthetic = small_stream(21);
    config.classifiers.push_back({"gnb", "gnb", {}});
    config.classifiers.push_back({"sea", "sea", {{"max_pool_size", "5"}}});
    config.metric_names = {"accuracy", "f1"};
    const ScoreTensor from_config = run_experiment(config);

    StreamGenerator stream(small_stream(21));
    std::vector<NamedLearner> learners;
    learners.push_back({"gnb", std::make_unique<GaussianNB>()});
    learners.push_back({"sea", std::make_unique<SEA>(5)});
    const std::vector<NamedMetric> metrics{resolve_metric("accuracy"),
                                           resolve_metric("f1")};
    const ScoreTensor direct = test_then_train(stream, learners, metrics);

    REQUIRE(from_config.n_classifiers() == direct.n_classifiers());
    REQUIRE(from_config.n_steps() == direct.n_steps());
    REQUIRE(from_config.n_metrics() == direct.n_metrics());
    for (std::size_t c = 0; c < direct.n_classifiers(); ++c) {
        for (std::size_t s = 0; s < direct.n_steps(); ++s) {
            for (std::size_t m = 0; m < direct.n_metrics(); ++m) {
                REQUIRE(from_config.at(c, s, m) ==
                        doctest::Approx(direct.at(c, s, m)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("run_experiment honors the prequential protocol setting") {
    ExperimentConfig preq;
    preq.synthetic = small_stream(22);
    preq.classifiers.push_back({"gnb", "gnb", {}});
    preq.protocol = "prequential";
    preq.window_size = preq.synthetic->chunk_size;
    const ScoreTensor windowed = run_experiment(preq);

    ExperimentConfig ttt = preq;
    ttt.protocol = "test_then_train";
    ttt.window_size = 0;
    const ScoreTensor plain = run_experiment(ttt);

    for (std::size_t s = 0; s < plain.n_steps(); ++s) {
        for (std::size_t m = 0; m < plain.n_metrics(); ++m) {
            REQUIRE(windowed.at(0, s, m) ==
                    doctest::Approx(plain.at(0, s, m)).epsilon(1e-9));
        }
    }
}

TEST_CASE("a parsed config runs end to end like its programmatic twin") {
    const ExperimentConfig parsed = parse(
        "stream.n_chunks = 15\n"
        "stream.chunk_size = 60\n"
        "stream.n_features = 5\n"
        "stream.n_informative = 2\n"
        "stream.n_redundant = 2\n"
        "stream.class_sep = 2.0\n"
        "stream.seed = 30\n"
        "classifiers[0].kind = gnb\n"
        "metrics = balanced_accuracy\n"
        "output.scores = scores.csv\n");
    const ScoreTensor from_text = run_experiment(parsed);

    StreamConfig stream_config;
    stream_config.n_chunks = 15;
    stream_config.chunk_size = 60;
    stream_config.n_features = 5;
    stream_config.n_informative = 2;
    stream_config.n_redundant = 2;
    stream_config.class_sep = 2.0;
    stream_config.random_seed = 30;
    StreamGenerator stream(stream_config);
    std::vector<NamedLearner> learners;
    learners.push_back({"gnb", std::make_unique<GaussianNB>()});
    const std::vector<NamedMetric> metrics{resolve_metric("balanced_accuracy")};
    const ScoreTensor direct = test_then_train(stream, learners, metrics);

    REQUIRE(from_text.n_steps() == 14);
    for (std::size_t s = 0; s < direct.n_steps(); ++s) {
        REQUIRE(from_text.at(0, s, 0) == direct.at(0, s, 0));
    }
}

TEST_CASE("parse_experiment_config_file reports unreadable paths") {
    CHECK_THROWS_WITH_AS(parse_experiment_config_file("/no/such/config.ini"),
                         doctest::Contains("cannot open config file"), ConfigError);
}

TEST_CASE("the svg report draws one panel per metric and one line per classifier") {
    ExperimentConfig config;
    config.synthetic = small_stream(23);
    config.classifiers.push_back({"gnb", "gnb", {}});
    config.classifiers.push_back({"wae", "wae", {}});
    config.metric_names = {"accuracy", "balanced_accuracy", "f1"};
    const ScoreTensor tensor = run_experiment(config);

    const std::string svg = render_score_svg(tensor);
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_occurrences(svg, "<polyline") == 2 * 3);
    for (const std::string label : {"accuracy", "balanced_accuracy", "f1"}) {
        CHECK(svg.find(">" + label + "</text>") != std::string::npos);
    }
    CHECK(svg.find(">gnb</text>") != std::string::npos);
    CHECK(svg.find(">wae</text>") != std::string::npos);

    TempDir dir;
    write_score_svg(tensor, dir.file("report.svg"));
    CHECK(read_file(dir.file("report.svg")) == svg);
    CHECK_THROWS_AS(write_score_svg(tensor, "/no/such/dir/report.svg"),
                    std::runtime_error);
}

TEST_SUITE_END();
