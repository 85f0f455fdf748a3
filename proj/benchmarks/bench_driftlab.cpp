#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "driftlab/ensembles.hpp"
#include "driftlab/evaluators.hpp"
#include "driftlab/generator.hpp"
#include "driftlab/metrics.hpp"

namespace {

using namespace driftlab;

Chunk gaussian_chunk(std::size_t rows, std::size_t n_features, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix features(rows, n_features);
    std::vector<std::size_t> labels(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        labels[r] = r % 2;
        const double center = labels[r] == 0 ? -2.0 : 2.0;
        for (std::size_t f = 0; f < n_features; ++f) {
            features(r, f) = center + noise(engine);
        }
    }
    return Chunk(std::move(features), labels);
}

const std::vector<std::size_t> kBinary{0, 1};

void BM_generator_next_chunk(benchmark::State& state) {
    StreamConfig config;
    config.chunk_size = static_cast<std::size_t>(state.range(0));
    config.n_chunks = 1000000;
    config.n_drifts = 1;
    StreamGenerator stream(config);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stream.next_chunk());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_generator_next_chunk)->Arg(200)->Arg(1000);

void BM_metrics_suite(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 engine(1);
    std::uniform_int_distribution<std::size_t> coin(0, 1);
    std::vector<std::size_t> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = coin(engine);
        p[i] = coin(engine);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::balanced_accuracy(y, p));
        benchmark::DoNotOptimize(metrics::f1(y, p));
        benchmark::DoNotOptimize(metrics::geometric_mean_1(y, p));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_metrics_suite)->Arg(10000);

void BM_gnb_partial_fit(benchmark::State& state) {
    const Chunk chunk = gaussian_chunk(500, 10, 7);
    for (auto _ : state) {
        GaussianNB model;
        model.partial_fit(chunk, kBinary);
        benchmark::DoNotOptimize(model);
    }
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_gnb_partial_fit);

void BM_gnb_predict(benchmark::State& state) {
    const Chunk chunk = gaussian_chunk(500, 10, 7);
    GaussianNB model;
    model.partial_fit(chunk, kBinary);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.predict(chunk.features()));
    }
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_gnb_predict);

void BM_online_bagging_update(benchmark::State& state) {
    const Chunk chunk = gaussian_chunk(250, 8, 9);
    OnlineBagging model(10, gaussian_nb_factory(), 42);
    for (auto _ : state) {
        model.partial_fit(chunk, kBinary);
    }
    state.SetItemsProcessed(state.iterations() * 250);
}
BENCHMARK(BM_online_bagging_update);

void BM_test_then_train(benchmark::State& state) {
    StreamConfig config;
    config.n_chunks = 20;
    config.chunk_size = 100;
    config.n_features = 8;
    config.n_informative = 3;
    config.n_redundant = 2;
    config.n_drifts = 1;
    for (auto _ : state) {
        StreamGenerator stream(config);
        std::vector<NamedLearner> learners;
        learners.push_back({"gnb", std::make_unique<GaussianNB>()});
        benchmark::DoNotOptimize(test_then_train(stream, learners));
    }
    state.SetItemsProcessed(state.iterations() * config.total_instances());
}
BENCHMARK(BM_test_then_train);

}  // namespace

BENCHMARK_MAIN();
