// OpenMP kernels against their serial references on a default-sized
// synthetic corpus.

#include "memepred/pipeline.hpp"
#include "memepred/rng.hpp"

#include <benchmark/benchmark.h>

using namespace memepred;

namespace {

struct Fixture {
    SyntheticNetwork synthetic;
    std::vector<Meme> memes;
    std::vector<EarlyWindow> windows;
    FeatureMatrix X;
    std::vector<int> y;
    CascadeSpec cascade_spec;

    Fixture() : synthetic(generate_network(PlantedPartitionSpec{})) {
        cascade_spec.meme_count = 1000;
        memes = generate_cascades(synthetic.network, synthetic.truth, cascade_spec);
        for (const auto& m : memes) {
            if (m.tweet_count() >= 25) windows.push_back(early_window(m, 25, synthetic.network));
        }
        const auto features = extract_batch(windows, synthetic.network, synthetic.truth);
        X = FeatureMatrix(features.size(), kFeatureCount);
        for (std::size_t r = 0; r < features.size(); ++r) {
            const auto row = features[r].to_array();
            for (std::size_t c = 0; c < kFeatureCount; ++c) X.at(r, c) = row[c];
            y.push_back(bin(windows[r].n + r % 400));
        }
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_PageRank(benchmark::State& state) {
    const auto& net = fixture().synthetic.network;
    for (auto _ : state) benchmark::DoNotOptimize(pagerank(net));
}

void BM_PageRankSerial(benchmark::State& state) {
    const auto& net = fixture().synthetic.network;
    for (auto _ : state) benchmark::DoNotOptimize(pagerank_serial(net));
}

void BM_ExtractBatch(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(extract_batch(f.windows, f.synthetic.network, f.synthetic.truth));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.windows.size()));
}

void BM_ExtractBatchSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_batch_serial(f.windows, f.synthetic.network, f.synthetic.truth));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.windows.size()));
}

ForestConfig bench_forest() {
    ForestConfig cfg;
    cfg.n_trees = 100;
    return cfg;
}

void BM_ForestTrain(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(RandomForest::train(f.X, f.y, bench_forest(), 1));
}

void BM_ForestTrainSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(RandomForest::train_serial(f.X, f.y, bench_forest(), 1));
}

void BM_Cascades(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_cascades(f.synthetic.network, f.synthetic.truth, f.cascade_spec));
    }
}

void BM_CascadesSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_cascades_serial(f.synthetic.network, f.synthetic.truth, f.cascade_spec));
    }
}

} // namespace

BENCHMARK(BM_PageRank)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PageRankSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestTrain)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestTrainSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cascades)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CascadesSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
