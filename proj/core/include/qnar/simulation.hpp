#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnar/auction.hpp"
#include "qnar/metrics.hpp"
#include "qnar/rng.hpp"
#include "qnar/token.hpp"

namespace qnar {

enum class WealthDistribution { Uniform, Pareto };
enum class OutcomeMode { Endogenous, Exogenous };

const char* to_string(WealthDistribution d);
const char* to_string(OutcomeMode m);
std::optional<WealthDistribution> wealth_distribution_from_string(const std::string& name);
std::optional<OutcomeMode> outcome_mode_from_string(const std::string& name);

// Initial wealth model. Both defaults have unit mean; a degenerate uniform
// interval (lo == hi) is allowed and yields constant stakes.
struct WealthModel {
    WealthDistribution kind = WealthDistribution::Uniform;
    double uniform_lo = 0.5;
    double uniform_hi = 1.5;
    // Shape must stay above 1 so the mean exists.
    double pareto_shape = 2.0;
    double pareto_scale = 0.5;
};

// One draw from the model. The Pareto draw inverts the CDF on (0, 1] so the
// raw bit stream fully determines the value on every platform.
double sample_wealth(const WealthModel& model, Rng& rng);

// Initial stakes for one replication, staker i drawing from the stream
// derived from (seed, replication, stream_ids[i]); stream_ids defaults to
// the staker index. Throws InvalidDistributionParams on a bad model.
std::vector<TokenAmount> init_stakes(std::int32_t n, const WealthModel& model,
                                     std::uint64_t seed, std::uint32_t replication = 0,
                                     std::span<const std::uint64_t> stream_ids = {});

struct SimulationConfig {
    std::int32_t stakers = 100;
    std::int64_t rounds = 1000;
    std::int32_t replications = 100;
    std::uint64_t seed = 0;
    WealthModel wealth;
    // Fraction of current wealth staked each round; quantized to whole
    // subunit factors so bids are exact integers.
    double bid_fraction = 0.1;
    // Chance a staker votes Accept.
    double vote_probability = 0.5;
    TokenAmount inflation = TokenAmount::from_tokens(std::int64_t{1});
    InflationMode inflation_mode = InflationMode::PerParticipant;
    OutcomeMode outcome = OutcomeMode::Endogenous;
    // Rounds (ascending, within [1, rounds]) at which running metrics are
    // snapshotted; the final round is always captured.
    std::vector<std::int64_t> checkpoints;
    // Per-staker RNG stream tags; defaults to the staker's index. Lets tests
    // permute identities without changing the draws behind them.
    std::vector<std::uint64_t> stream_ids;
    // When set, every replication keeps its full per-round wealth path
    // (rounds x stakers subunit values). Costly for large grids, so off by
    // default.
    bool record_wealth = false;
    int threads = 1;
    // Cooperative cancellation: when set and observed true, no further
    // replications start and the result is marked interrupted.
    const std::atomic<bool>* cancel = nullptr;
};

struct CheckpointMetrics {
    std::int64_t round = 0;
    std::int64_t alive = 0;
    Welford returns;
};

struct ReplicationResult {
    std::uint32_t index = 0;
    bool completed = false;
    // True when the replication ran out of live stakers before the last
    // round; rounds_completed then marks where it stopped.
    bool truncated = false;
    std::int64_t rounds_completed = 0;
    std::int64_t survivors = 0;
    Welford returns;
    std::vector<CheckpointMetrics> checkpoints;
    std::vector<std::int64_t> survival;
    std::vector<TokenAmount> final_wealths;
    // Row-major rounds_completed x stakers wealth subunits, filled only when
    // the config asks for wealth paths.
    std::vector<std::int64_t> wealth_path;
    TokenAmount initial_wealth;
    TokenAmount final_wealth;
    TokenAmount minted;
};

struct SimulationResult {
    SimulationConfig config;
    bool interrupted = false;
    std::vector<ReplicationResult> replications;

    std::vector<double> sharpe_per_replication() const;
    Welford pooled_returns() const;
};

// Runs `replications` independent staking games. Each round every live
// staker bids bid_fraction of their wealth and votes Accept with probability
// vote_probability; the round settles either by stake-weighted majority
// (Endogenous) or against a fair-coin ground truth (Exogenous). A staker
// whose bid rounds down to zero subunits sits out for good and records a
// flat zero return from then on. Every replication derives its streams from
// (seed, replication, staker), so results are identical for any thread
// count, and replications are distributed across config.threads workers.
SimulationResult run_simulation(const SimulationConfig& config);

} // namespace qnar
