#include <benchmark/benchmark.h>

#include "uniclass/knn.hpp"
#include "uniclass/knn_oracle.hpp"
#include "uniclass/rng.hpp"

using namespace uniclass;

namespace {

EmbeddingMatrix random_matrix(std::uint64_t seed, std::size_t rows, std::size_t dim) {
    Rng rng(seed);
    std::vector<std::string> ids;
    std::vector<float> data(rows * dim);
    for (auto& x : data) x = static_cast<float>(rng.normal());
    for (std::size_t i = 0; i < rows; ++i) ids.push_back("r" + std::to_string(i));
    return EmbeddingMatrix(std::move(ids), std::move(data), dim, false, "bench");
}

std::vector<std::string> labels(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back("c" + std::to_string(i % 7));
    return v;
}

struct Data {
    KnnModel model;
    EmbeddingMatrix queries;
    std::vector<std::string> golds;
};

const Data& data() {
    // Sizes close to the universal experiment: 7000 references, 768-d vectors.
    static const Data d{fit(random_matrix(1, 7000, 768), labels(7000)), random_matrix(2, 256, 768), labels(256)};
    return d;
}

void BM_PredictBatchSerial(benchmark::State& state) {
    const auto& d = data();
    for (auto _ : state) benchmark::DoNotOptimize(predict_batch_serial(d.model, d.queries, 25));
    state.SetItemsProcessed(state.iterations() * d.queries.rows());
}

void BM_PredictBatchParallel(benchmark::State& state) {
    const auto& d = data();
    for (auto _ : state) benchmark::DoNotOptimize(predict_batch(d.model, d.queries, 25, int(state.range(0))));
    state.SetItemsProcessed(state.iterations() * d.queries.rows());
}

void BM_NaiveOracle(benchmark::State& state) {
    const auto& d = data();
    for (auto _ : state) {
        for (std::size_t i = 0; i < 32; ++i) benchmark::DoNotOptimize(knn_naive_oracle(d.model, d.queries.row(i), 25));
    }
    state.SetItemsProcessed(state.iterations() * 32);
}

void BM_SweepSerial(benchmark::State& state) {
    const auto& d = data();
    for (auto _ : state) benchmark::DoNotOptimize(sweep_k_serial(d.model, d.queries, d.golds, 100));
    state.SetItemsProcessed(state.iterations() * d.queries.rows());
}

void BM_SweepParallel(benchmark::State& state) {
    const auto& d = data();
    for (auto _ : state) benchmark::DoNotOptimize(sweep_k(d.model, d.queries, d.golds, 100, int(state.range(0))));
    state.SetItemsProcessed(state.iterations() * d.queries.rows());
}

}  // namespace

BENCHMARK(BM_PredictBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictBatchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NaiveOracle)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
