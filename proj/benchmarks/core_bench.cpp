// Microbenchmarks for the hot paths: graph construction, shape
// propagation, cost analysis, pruning, label parsing and profiling,
// and the reference executor at a desk-scale input.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>

#include "yoloslim/builder.hpp"
#include "yoloslim/corpus.hpp"
#include "yoloslim/cost.hpp"
#include "yoloslim/interp.hpp"
#include "yoloslim/labels.hpp"
#include "yoloslim/prune.hpp"
#include "yoloslim/shapes.hpp"

using namespace yoloslim;

namespace {

const ArchGraph& reference() {
    static const ArchGraph g = build_yolov11n();
    return g;
}

void BM_BuildReferenceGraph(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_yolov11n());
    }
}
BENCHMARK(BM_BuildReferenceGraph);

void BM_PropagateShapes640(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(propagate_shapes(reference(), {3, 640, 640}));
    }
}
BENCHMARK(BM_PropagateShapes640);

void BM_Validate(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(validate(reference()));
    }
}
BENCHMARK(BM_Validate);

void BM_CostGraph640(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost_graph(reference(), {3, 640, 640}));
    }
}
BENCHMARK(BM_CostGraph640);

void BM_Prune(benchmark::State& state) {
    const Variant v = kAllVariants[state.range(0)];
    state.SetLabel(std::string(to_string(v)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(prune(reference(), v));
    }
}
BENCHMARK(BM_Prune)->DenseRange(0, 6);

void BM_ParseLabelLine(benchmark::State& state) {
    const std::string line = "17 0.512345 0.498765 0.103125 0.207813";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_label_line(line));
    }
}
BENCHMARK(BM_ParseLabelLine);

void BM_ProfileDirectory(benchmark::State& state) {
    const auto dir =
        std::filesystem::temp_directory_path() / "yoloslim-bench-corpus";
    std::filesystem::remove_all(dir);
    write_label_corpus(dir, CorpusSpec{"bench", 2000, 2000, 2000});
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            profile_directory(dir, ImageSizePolicy::fixed()));
    }
    state.SetItemsProcessed(state.iterations() * 6000);
    std::filesystem::remove_all(dir);
}
BENCHMARK(BM_ProfileDirectory);

void BM_Instantiate(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(instantiate(reference(), 0));
    }
}
BENCHMARK(BM_Instantiate);

void BM_Forward64(benchmark::State& state) {
    const WeightStore weights = instantiate(reference(), 0);
    const Tensor input = make_test_input(3, 64, 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(reference(), weights, input));
    }
}
BENCHMARK(BM_Forward64);

}  // namespace

BENCHMARK_MAIN();
