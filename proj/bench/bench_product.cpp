// Chunked (OpenMP) product against the serial closed-form reference.

#include "mapmatch/algebra.hpp"
#include "mapmatch/synth.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace mapmatch;

namespace {

const Graph& operand(std::size_t n, int which) {
    static std::map<std::pair<std::size_t, int>, Graph> cache;
    auto key = std::make_pair(n, which);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, random_block_graph(n, 10, 1000 + which)).first;
    return it->second;
}

void BM_ProductExact(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Graph& g0 = operand(n, 0);
    const Graph& g1 = operand(n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(product_exact(g0, g1));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_ProductChunked(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const int workers = static_cast<int>(state.range(1));
    const Graph& g0 = operand(n, 0);
    const Graph& g1 = operand(n, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(product_chunked(g0, g1, static_cast<std::size_t>(workers), workers));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_Normalize(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Graph g = sum(operand(n, 0), operand(n, 1));
    for (auto _ : state) benchmark::DoNotOptimize(normalize(g));
}

} // namespace

BENCHMARK(BM_ProductExact)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProductChunked)
    ->ArgsProduct({{500, 2000, 10000}, {1, 2, 4, 8}})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Normalize)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
