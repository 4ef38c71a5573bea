#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "qnar/auction.hpp"
#include "qnar/rng.hpp"
#include "qnar/token.hpp"

namespace {

using namespace qnar;

std::vector<RoundBid> random_bids(std::size_t n, Rng& rng) {
    std::vector<RoundBid> bids(n);
    for (std::size_t i = 0; i < n; ++i)
        bids[i] = {static_cast<std::uint32_t>(i),
                   TokenAmount::from_subunits(1 + rng.next_u64() % 5'000'000'000ULL),
                   rng.bernoulli(0.5) ? Vote::Accept : Vote::Deny};
    return bids;
}

void BM_CommitmentDigest(benchmark::State& state) {
    Nonce nonce{};
    nonce[7] = 0x2a;
    TokenAmount stake = TokenAmount::parse("12.5");
    for (auto _ : state) {
        Digest d = commitment_digest("staker-123", stake, Vote::Accept, nonce);
        benchmark::DoNotOptimize(d.data());
    }
}
BENCHMARK(BM_CommitmentDigest);

void BM_SettleRound(benchmark::State& state) {
    Rng rng(1);
    std::vector<RoundBid> bids = random_bids(static_cast<std::size_t>(state.range(0)), rng);
    AuctionConfig cfg;
    cfg.inflation = TokenAmount::from_tokens(std::int64_t{1});
    for (auto _ : state) {
        RoundResult result = settle_round(bids, cfg);
        benchmark::DoNotOptimize(result.returned.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SettleRound)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_SealedRound(benchmark::State& state) {
    std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    std::vector<RoundBid> bids = random_bids(n, rng);
    TokenAmount deposit = TokenAmount::from_tokens(std::int64_t{1});
    for (auto _ : state) {
        ReviewAuction auction("prop", deposit);
        Nonce nonce{};
        for (std::size_t i = 0; i < n; ++i) {
            nonce[0] = static_cast<std::uint8_t>(i);
            std::string staker = "s" + std::to_string(i);
            auction.commit(staker,
                           commitment_digest(staker, bids[i].stake, bids[i].vote, nonce));
        }
        auction.close_commits();
        for (std::size_t i = 0; i < n; ++i) {
            nonce[0] = static_cast<std::uint8_t>(i);
            auction.reveal("s" + std::to_string(i), bids[i].stake, bids[i].vote, nonce);
        }
        Settlement s = auction.settle();
        benchmark::DoNotOptimize(s.receipts.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SealedRound)->Arg(4)->Arg(32);

} // namespace
