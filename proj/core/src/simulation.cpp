#include "qnar/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "qnar/errors.hpp"

namespace qnar {

const char* to_string(WealthDistribution d) {
    return d == WealthDistribution::Uniform ? "uniform" : "pareto";
}

const char* to_string(OutcomeMode m) {
    return m == OutcomeMode::Endogenous ? "endogenous" : "exogenous";
}

std::optional<WealthDistribution> wealth_distribution_from_string(const std::string& name) {
    if (name == "uniform") return WealthDistribution::Uniform;
    if (name == "pareto") return WealthDistribution::Pareto;
    return std::nullopt;
}

std::optional<OutcomeMode> outcome_mode_from_string(const std::string& name) {
    if (name == "endogenous") return OutcomeMode::Endogenous;
    if (name == "exogenous") return OutcomeMode::Exogenous;
    return std::nullopt;
}

namespace {

void validate_model(const WealthModel& model) {
    if (model.kind == WealthDistribution::Uniform) {
        if (!(model.uniform_lo >= 0.0) || !(model.uniform_hi >= model.uniform_lo))
            fail(errc::invalid_distribution_params, "uniform bounds must satisfy 0 <= lo <= hi");
    } else {
        if (!(model.pareto_shape > 1.0))
            fail(errc::invalid_distribution_params, "pareto shape must exceed 1 for a finite mean");
        if (!(model.pareto_scale > 0.0))
            fail(errc::invalid_distribution_params, "pareto scale must be positive");
    }
}

// Stream channels hung off (seed, replication): one wealth and one vote
// stream per staker plus a shared ground-truth stream.
constexpr std::uint64_t kWealthChannel = 0;
constexpr std::uint64_t kVoteChannel = 1;
constexpr std::uint64_t kTruthChannel = 2;

std::uint64_t channel_tag(std::uint32_t replication, std::uint64_t channel) {
    return static_cast<std::uint64_t>(replication) * 4 + channel;
}

} // namespace

double sample_wealth(const WealthModel& model, Rng& rng) {
    if (model.kind == WealthDistribution::Uniform)
        return model.uniform_lo + rng.uniform01() * (model.uniform_hi - model.uniform_lo);
    return model.pareto_scale * std::pow(rng.open_unit(), -1.0 / model.pareto_shape);
}

std::vector<TokenAmount> init_stakes(std::int32_t n, const WealthModel& model,
                                     std::uint64_t seed, std::uint32_t replication,
                                     std::span<const std::uint64_t> stream_ids) {
    validate_model(model);
    if (!stream_ids.empty() && stream_ids.size() != static_cast<std::size_t>(n))
        fail(errc::parse_error, "stream_ids must list one tag per staker");
    std::vector<TokenAmount> stakes(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < stakes.size(); ++i) {
        std::uint64_t sid = stream_ids.empty() ? i : stream_ids[i];
        Rng rng(derive_stream(seed, channel_tag(replication, kWealthChannel), sid));
        stakes[i] = TokenAmount::from_tokens(sample_wealth(model, rng));
    }
    return stakes;
}

namespace {

struct Plan {
    std::int64_t f_quantized;
    std::vector<std::uint64_t> stream_ids;
    std::vector<std::int64_t> checkpoints;
};

Plan validate(const SimulationConfig& cfg) {
    if (cfg.stakers < 2) fail(errc::not_enough_players, "simulation needs at least two stakers");
    if (cfg.rounds < 1) fail(errc::parse_error, "rounds must be positive");
    if (cfg.replications < 1) fail(errc::parse_error, "replications must be positive");
    if (cfg.threads < 1) fail(errc::parse_error, "threads must be positive");
    if (!(cfg.vote_probability >= 0.0 && cfg.vote_probability <= 1.0))
        fail(errc::parse_error, "vote probability must lie in [0, 1]");
    validate_model(cfg.wealth);

    std::int64_t fq = std::llround(cfg.bid_fraction * TokenAmount::kSubunitsPerToken);
    if (!(cfg.bid_fraction > 0.0) || fq < 1 || fq > TokenAmount::kSubunitsPerToken)
        fail(errc::invalid_distribution_params, "bid fraction must lie in (0, 1]");

    std::vector<std::uint64_t> sids = cfg.stream_ids;
    if (sids.empty()) {
        sids.resize(static_cast<std::size_t>(cfg.stakers));
        for (std::size_t i = 0; i < sids.size(); ++i) sids[i] = i;
    } else if (sids.size() != static_cast<std::size_t>(cfg.stakers)) {
        fail(errc::parse_error, "stream_ids must list one tag per staker");
    }

    std::vector<std::int64_t> cps = cfg.checkpoints;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (cps[i] < 1 || cps[i] > cfg.rounds)
            fail(errc::parse_error, "checkpoint outside [1, rounds]");
        if (i > 0 && cps[i] <= cps[i - 1])
            fail(errc::parse_error, "checkpoints must be strictly ascending");
    }
    return {fq, std::move(sids), std::move(cps)};
}

ReplicationResult run_replication(const SimulationConfig& cfg, const Plan& plan,
                                  std::uint32_t rep) {
    const auto n = static_cast<std::size_t>(cfg.stakers);
    AuctionConfig auction_cfg;
    auction_cfg.inflation = cfg.inflation;
    auction_cfg.inflation_mode = cfg.inflation_mode;

    ReplicationResult res;
    res.index = rep;
    res.survival.assign(n, 0);

    std::vector<TokenAmount> wealth = init_stakes(cfg.stakers, cfg.wealth, cfg.seed, rep,
                                                  plan.stream_ids);
    std::vector<Rng> vote_rng;
    vote_rng.reserve(n);
    std::vector<bool> alive(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        res.initial_wealth += wealth[i];
        vote_rng.emplace_back(
            derive_stream(cfg.seed, channel_tag(rep, kVoteChannel), plan.stream_ids[i]));
    }
    Rng truth_rng(derive_stream(cfg.seed, channel_tag(rep, kTruthChannel), 0));

    std::vector<RoundBid> bids;
    bids.reserve(n);
    std::size_t next_checkpoint = 0;
    for (std::int64_t round = 1; round <= cfg.rounds; ++round) {
        bids.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            TokenAmount bid = wealth[i].scaled(plan.f_quantized, TokenAmount::kSubunitsPerToken);
            if (bid.is_zero()) {
                alive[i] = false;
                res.survival[i] = round - 1;
                continue;
            }
            bids.push_back(RoundBid{static_cast<std::uint32_t>(i), bid, Vote::Accept});
        }
        if (bids.size() < 2) {
            res.truncated = true;
            break;
        }

        for (RoundBid& b : bids)
            b.vote = vote_rng[b.staker].bernoulli(cfg.vote_probability) ? Vote::Accept
                                                                        : Vote::Deny;
        std::optional<Outcome> forced;
        if (cfg.outcome == OutcomeMode::Exogenous)
            forced = truth_rng.bernoulli(0.5) ? Outcome::Accepted : Outcome::Denied;

        RoundResult settled = settle_round(bids, auction_cfg, forced);
        std::vector<double> round_return(n, 0.0);
        for (std::size_t b = 0; b < bids.size(); ++b) {
            TokenAmount before = wealth[bids[b].staker];
            TokenAmount after =
                before - bids[b].stake + settled.returned[b] + settled.inflation[b];
            wealth[bids[b].staker] = after;
            round_return[bids[b].staker] =
                static_cast<double>(after.subunits() - before.subunits()) /
                static_cast<double>(before.subunits());
        }
        // Stakers who sat the round out hold their wealth, so their return
        // for the round is an exact zero sample.
        for (double r : round_return) res.returns.add(r);
        res.minted += settled.minted;
        res.rounds_completed = round;
        if (cfg.record_wealth)
            for (const TokenAmount& w : wealth) res.wealth_path.push_back(w.subunits());

        if (next_checkpoint < plan.checkpoints.size() &&
            plan.checkpoints[next_checkpoint] == round) {
            ++next_checkpoint;
            res.checkpoints.push_back(
                CheckpointMetrics{round, static_cast<std::int64_t>(bids.size()), res.returns});
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        ++res.survivors;
        res.survival[i] = res.rounds_completed;
    }
    for (std::size_t i = 0; i < n; ++i) res.final_wealth += wealth[i];
    res.final_wealths = std::move(wealth);
    if (res.checkpoints.empty() || res.checkpoints.back().round != res.rounds_completed)
        res.checkpoints.push_back(
            CheckpointMetrics{res.rounds_completed, res.survivors, res.returns});
    res.completed = true;
    return res;
}

} // namespace

SimulationResult run_simulation(const SimulationConfig& config) {
    Plan plan = validate(config);

    SimulationResult result;
    result.config = config;
    result.replications.resize(static_cast<std::size_t>(config.replications));

    const auto reps = static_cast<std::uint32_t>(config.replications);
    std::atomic<std::uint32_t> next{0};
    std::atomic<bool> interrupted{false};
    auto run_available = [&] {
        while (true) {
            if (config.cancel && config.cancel->load(std::memory_order_relaxed)) {
                interrupted.store(true, std::memory_order_relaxed);
                return;
            }
            std::uint32_t rep = next.fetch_add(1);
            if (rep >= reps) return;
            result.replications[rep] = run_replication(config, plan, rep);
        }
    };

    const unsigned workers = std::min<unsigned>(static_cast<unsigned>(config.threads), reps);
    if (workers <= 1) {
        run_available();
    } else {
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto work = [&] {
            try {
                run_available();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    result.interrupted = interrupted.load();
    if (result.interrupted) {
        std::erase_if(result.replications,
                      [](const ReplicationResult& r) { return !r.completed; });
    }
    return result;
}

std::vector<double> SimulationResult::sharpe_per_replication() const {
    std::vector<double> out;
    out.reserve(replications.size());
    for (const ReplicationResult& rep : replications) out.push_back(sharpe_ratio(rep.returns));
    return out;
}

Welford SimulationResult::pooled_returns() const {
    Welford pooled;
    for (const ReplicationResult& rep : replications) pooled.merge(rep.returns);
    return pooled;
}

} // namespace qnar
