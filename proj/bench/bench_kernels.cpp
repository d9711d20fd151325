// OpenMP kernels against their serial reference sums.

#include <benchmark/benchmark.h>

#include "regulab/generators.hpp"
#include "regulab/partitions.hpp"
#include "regulab/quasirandomness.hpp"

using namespace regulab;

namespace {

Mode mode_of(const benchmark::State& st) { return st.range(1) ? Mode::fast : Mode::naive; }

void BM_C4(benchmark::State& st) {
    const uint32_t n = uint32_t(st.range(0));
    auto g = random_bipartite(n, n, rat(1, 2), 1);
    const auto& m = g.pair(0, 1).adj;
    for (auto _ : st) benchmark::DoNotOptimize(pair_quasirandomness(m, mode_of(st)).value);
}

Chain bench_chain(uint32_t n) {
    auto g = random_multipartite({n, n, n}, rat(3, 4), 2);
    ThreeGraph h = ThreeGraph::partite(g.vertices());
    SplitMix64 rng(3);
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t b = n; b < 2 * n; ++b)
            for (uint32_t c = 2 * n; c < 3 * n; ++c)
                if (g.adjacent(a, b) && g.adjacent(a, c) && g.adjacent(b, c) && rng.coin()) h.add(a, b, c);
    return Chain(std::move(g), std::move(h));
}

void BM_Oct(benchmark::State& st) {
    Chain ch = bench_chain(uint32_t(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(chain_quasirandomness(ch, mode_of(st)).value);
}

void BM_Q(benchmark::State& st) {
    Chain ch = bench_chain(uint32_t(st.range(0)));
    EdgePartition pe = EdgePartition::trivial(ch.graph());
    SplitMix64 rng(4);
    for (auto& pp : pe.pairs) {
        for (auto& l : pp.label)
            if (l >= 0) l = int32_t(rng.below(4));
        pp.parts = 4;
        pp.compact();
    }
    for (auto _ : st) benchmark::DoNotOptimize(q_edge_partition(ch, pe, mode_of(st)));
}

}  // namespace

// second argument: 0 serial reference, 1 fast kernel
BENCHMARK(BM_C4)->ArgsProduct({{8, 16, 32}, {0, 1}});
BENCHMARK(BM_C4)->ArgsProduct({{128, 256}, {1}});
BENCHMARK(BM_Oct)->ArgsProduct({{4, 6}, {0, 1}});
BENCHMARK(BM_Oct)->ArgsProduct({{16, 32}, {1}});
BENCHMARK(BM_Q)->ArgsProduct({{6, 10}, {0, 1}});

BENCHMARK_MAIN();
