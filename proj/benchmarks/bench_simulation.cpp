#include <benchmark/benchmark.h>

#include "qnar/simulation.hpp"
#include "qnar/token.hpp"

namespace {

using namespace qnar;

void BM_StakingGame(benchmark::State& state) {
    SimulationConfig cfg;
    cfg.stakers = static_cast<std::int32_t>(state.range(0));
    cfg.rounds = 100;
    cfg.replications = 1;
    cfg.seed = 9;
    cfg.inflation = TokenAmount::from_tokens(std::int64_t{1});
    for (auto _ : state) {
        cfg.seed += 1;
        SimulationResult result = run_simulation(cfg);
        benchmark::DoNotOptimize(result.replications.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.stakers * cfg.rounds);
}
BENCHMARK(BM_StakingGame)->Arg(10)->Arg(100)->Arg(1000);

void BM_InitStakes(benchmark::State& state) {
    WealthModel pareto;
    pareto.kind = WealthDistribution::Pareto;
    for (auto _ : state) {
        std::vector<TokenAmount> stakes =
            init_stakes(static_cast<std::int32_t>(state.range(0)), pareto, 42);
        benchmark::DoNotOptimize(stakes.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InitStakes)->Arg(100)->Arg(10000);

} // namespace
