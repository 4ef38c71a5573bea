#include <benchmark/benchmark.h>

#include <string>

#include "qnar/graph.hpp"
#include "qnar/pagerank.hpp"

namespace {

using namespace qnar;

// Ring with chords: strongly connected, sparse, and deterministic, so the
// iteration count stays comparable across runs.
ContributionGraph ring_with_chords(std::size_t n) {
    ContributionGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        NodeKind kind = i % 2 == 0 ? NodeKind::User : NodeKind::Courselet;
        g.add_node(NodeId{kind, "n" + std::to_string(i), 0});
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.accumulate_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>((i + 1) % n),
                          1.0);
        if (i % 3 == 0)
            g.accumulate_edge(static_cast<std::uint32_t>(i),
                              static_cast<std::uint32_t>((i * 7 + 3) % n), 0.5);
    }
    return g;
}

void BM_PowerIteration(benchmark::State& state) {
    ContributionGraph g = ring_with_chords(static_cast<std::size_t>(state.range(0)));
    std::vector<double> seed = uniform_seed(g);
    for (auto _ : state) {
        PageRankResult result = pagerank(g, seed);
        benchmark::DoNotOptimize(result.scores.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PowerIteration)->Arg(100)->Arg(1000)->Arg(10000);

void BM_TwoPassPageRank(benchmark::State& state) {
    ContributionGraph g = ring_with_chords(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        PageRankResult result = two_pass_pagerank(g);
        benchmark::DoNotOptimize(result.scores.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TwoPassPageRank)->Arg(100)->Arg(1000);

void BM_DenseSolve(benchmark::State& state) {
    ContributionGraph g = ring_with_chords(static_cast<std::size_t>(state.range(0)));
    std::vector<double> seed = uniform_seed(g);
    for (auto _ : state) {
        std::vector<double> scores = pagerank_direct(g, seed);
        benchmark::DoNotOptimize(scores.data());
    }
}
BENCHMARK(BM_DenseSolve)->Arg(50)->Arg(200);

} // namespace

BENCHMARK_MAIN();
