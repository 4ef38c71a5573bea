#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnar/auction.hpp"
#include "qnar/errors.hpp"
#include "qnar/rng.hpp"
#include "qnar/token.hpp"

using namespace qnar;

namespace {

TokenAmount tokens(std::int64_t whole) { return TokenAmount::from_tokens(whole); }

Nonce filled_nonce(std::uint8_t byte) {
    Nonce n{};
    n.fill(byte);
    return n;
}

Digest digest_from_hex(const std::string& hex) {
    std::vector<std::uint8_t> bytes = from_hex(hex);
    REQUIRE(bytes.size() == 32);
    Digest d{};
    std::copy(bytes.begin(), bytes.end(), d.begin());
    return d;
}

// Builds the three-staker round used throughout: S1 stakes 1 on accept,
// S2 stakes 2 on accept, S3 stakes 2 on deny.
ReviewAuction worked_auction(AuctionConfig config = {}) {
    ReviewAuction auction("P", tokens(1), config);
    auction.commit("S1", commitment_digest("S1", tokens(1), Vote::Accept, filled_nonce(1)));
    auction.commit("S2", commitment_digest("S2", tokens(2), Vote::Accept, filled_nonce(2)));
    auction.commit("S3", commitment_digest("S3", tokens(2), Vote::Deny, filled_nonce(3)));
    auction.close_commits();
    auction.reveal("S1", tokens(1), Vote::Accept, filled_nonce(1));
    auction.reveal("S2", tokens(2), Vote::Accept, filled_nonce(2));
    auction.reveal("S3", tokens(2), Vote::Deny, filled_nonce(3));
    return auction;
}

} // namespace

TEST_CASE("hex encoding round trips and rejects malformed input") {
    std::vector<std::uint8_t> bytes = {0x00, 0x1f, 0xab, 0xff};
    CHECK(to_hex(bytes) == "001fabff");
    CHECK(from_hex("001fabff") == bytes);
    CHECK(from_hex("001FABFF") == bytes);
    CHECK(from_hex("").empty());
    CHECK_THROWS_AS(from_hex("abc"), Error);
    CHECK_THROWS_AS(from_hex("zz"), Error);
}

TEST_CASE("commitment digests match externally computed vectors") {
    CHECK(commitment_digest("S1", tokens(1), Vote::Accept, filled_nonce(1)) ==
          digest_from_hex("b0a5441c011d410c8dc70eee7cdddc3cfd6754aaee887c01e3505bf2f7b8ed7f"));
    CHECK(commitment_digest("S2", tokens(2), Vote::Accept, filled_nonce(2)) ==
          digest_from_hex("da32e306cc45999fbbdae6513804ee17dc7dacc552091d7687b50d329591fca0"));
    CHECK(commitment_digest("S3", tokens(2), Vote::Deny, filled_nonce(3)) ==
          digest_from_hex("1fbaf70084312819d6deda4ebc34ad2bc1ac394051739c8fc6cff7d9698a27a7"));

    // Every field feeds the digest, so perturbing any one must change it.
    Digest base = commitment_digest("S1", tokens(1), Vote::Accept, filled_nonce(1));
    CHECK(commitment_digest("S2", tokens(1), Vote::Accept, filled_nonce(1)) != base);
    CHECK(commitment_digest("S1", tokens(2), Vote::Accept, filled_nonce(1)) != base);
    CHECK(commitment_digest("S1", tokens(1), Vote::Deny, filled_nonce(1)) != base);
    CHECK(commitment_digest("S1", tokens(1), Vote::Accept, filled_nonce(9)) != base);
}

TEST_CASE("worked round splits the pot among accept voters") {
    std::vector<RoundBid> bids = {
        {0, tokens(1), Vote::Accept},
        {1, tokens(2), Vote::Accept},
        {2, tokens(2), Vote::Deny},
    };
    RoundResult r = settle_round(bids, AuctionConfig{});

    CHECK(r.outcome == Outcome::Accepted);
    CHECK(!r.tie);
    CHECK(r.decision_sign == 1);
    CHECK(r.decision_magnitude == tokens(1));
    CHECK(r.pot == tokens(5));
    CHECK(r.returned[0].subunits() == 1'666'666'667);
    CHECK(r.returned[1].subunits() == 3'333'333'333);
    CHECK(r.returned[2].is_zero());
    CHECK(r.ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.minted.is_zero());
}

TEST_CASE("the sealed-bid flow reproduces the direct settlement") {
    ReviewAuction auction = worked_auction();
    CHECK(auction.phase() == Phase::Reveal);
    Settlement s = auction.settle();
    CHECK(auction.phase() == Phase::Settled);

    CHECK(s.outcome == Outcome::Accepted);
    CHECK(s.decision_sign == 1);
    CHECK(s.decision_magnitude == tokens(1));
    CHECK(s.pot == tokens(5));
    CHECK(s.burned.is_zero());
    CHECK(s.deposit_returned == tokens(1));
    REQUIRE(s.receipts.size() == 3);
    CHECK(s.receipts[0].staker == "S1");
    CHECK(s.receipts[0].returned.subunits() == 1'666'666'667);
    CHECK(s.receipts[1].returned.subunits() == 3'333'333'333);
    CHECK(s.receipts[2].returned.is_zero());
    CHECK(s.receipts[2].revealed);
    CHECK(!s.receipts[2].forfeited);
}

TEST_CASE("journal replay reaches the same settlement") {
    std::vector<AuctionAction> actions;
    actions.push_back({AuctionAction::Op::Propose, "P", tokens(1), Vote::Accept, {}, {}});
    actions.push_back({AuctionAction::Op::Commit, "S1", {}, Vote::Accept,
                       commitment_digest("S1", tokens(1), Vote::Accept, filled_nonce(1)), {}});
    actions.push_back({AuctionAction::Op::Commit, "S2", {}, Vote::Accept,
                       commitment_digest("S2", tokens(2), Vote::Accept, filled_nonce(2)), {}});
    actions.push_back({AuctionAction::Op::CloseCommits, "", {}, Vote::Accept, {}, {}});
    actions.push_back(
        {AuctionAction::Op::Reveal, "S1", tokens(1), Vote::Accept, {}, filled_nonce(1)});
    actions.push_back(
        {AuctionAction::Op::Reveal, "S2", tokens(2), Vote::Accept, {}, filled_nonce(2)});
    actions.push_back({AuctionAction::Op::Settle, "", {}, Vote::Accept, {}, {}});

    Settlement s = replay_auction(actions, AuctionConfig{});
    CHECK(s.outcome == Outcome::Accepted);
    CHECK(s.pot == tokens(3));
    CHECK(s.receipts[0].returned == tokens(1));
    CHECK(s.receipts[1].returned == tokens(2));

    SUBCASE("journal must start with a proposal") {
        std::vector<AuctionAction> bad(actions.begin() + 1, actions.end());
        CHECK_THROWS_AS(replay_auction(bad, AuctionConfig{}), Error);
    }
    SUBCASE("second proposal is rejected") {
        std::vector<AuctionAction> bad = actions;
        bad.insert(bad.begin() + 1, actions.front());
        CHECK_THROWS_AS(replay_auction(bad, AuctionConfig{}), Error);
    }
    SUBCASE("journal must end at the settlement") {
        std::vector<AuctionAction> bad = actions;
        bad.push_back(actions.back());
        CHECK_THROWS_AS(replay_auction(bad, AuctionConfig{}), Error);
        bad = actions;
        bad.pop_back();
        CHECK_THROWS_AS(replay_auction(bad, AuctionConfig{}), Error);
    }
    SUBCASE("a tampered reveal forfeits but the replay carries on") {
        std::vector<AuctionAction> tampered = actions;
        tampered[4].amount = tokens(5);
        Settlement st = replay_auction(tampered, AuctionConfig{});
        CHECK(st.receipts[0].forfeited);
        CHECK(st.burned == tokens(5));
        CHECK(st.pot == tokens(2));
        CHECK(st.outcome == Outcome::Accepted);
    }
}

TEST_CASE("a tie denies and refunds every stake") {
    std::vector<RoundBid> bids = {
        {0, tokens(2), Vote::Accept},
        {1, tokens(2), Vote::Deny},
    };
    RoundResult r = settle_round(bids, AuctionConfig{});
    CHECK(r.outcome == Outcome::Denied);
    CHECK(r.tie);
    CHECK(r.decision_sign == 0);
    CHECK(r.decision_magnitude.is_zero());
    CHECK(r.returned[0] == tokens(2));
    CHECK(r.returned[1] == tokens(2));
    CHECK(r.ratio == 0.0);
}

TEST_CASE("unanimous votes return every stake exactly") {
    std::vector<RoundBid> bids = {
        {0, TokenAmount::parse("0.123456789"), Vote::Deny},
        {1, TokenAmount::parse("7.000000001"), Vote::Deny},
        {2, tokens(3), Vote::Deny},
    };
    RoundResult r = settle_round(bids, AuctionConfig{});
    CHECK(r.outcome == Outcome::Denied);
    CHECK(!r.tie);
    for (std::size_t i = 0; i < bids.size(); ++i) CHECK(r.returned[i] == bids[i].stake);
    CHECK(r.ratio == 0.0);
}

TEST_CASE("a forced outcome with no winners refunds everyone") {
    std::vector<RoundBid> bids = {
        {0, tokens(1), Vote::Accept},
        {1, tokens(2), Vote::Accept},
    };
    RoundResult r = settle_round(bids, AuctionConfig{}, Outcome::Denied);
    CHECK(r.outcome == Outcome::Denied);
    CHECK(!r.tie);
    CHECK(r.returned[0] == tokens(1));
    CHECK(r.returned[1] == tokens(2));

    RoundResult forced = settle_round(bids, AuctionConfig{}, Outcome::Accepted);
    CHECK(forced.returned[0] == tokens(1));
    CHECK(forced.returned[1] == tokens(2));
    // The recorded vote tally ignores the forced outcome.
    CHECK(forced.decision_sign == 1);
    CHECK(forced.decision_magnitude == tokens(3));
}

TEST_CASE("inflation modes mint per participant or split a total") {
    std::vector<RoundBid> bids = {
        {0, tokens(1), Vote::Accept},
        {1, tokens(1), Vote::Accept},
        {2, tokens(1), Vote::Accept},
    };

    AuctionConfig per;
    per.inflation = tokens(1);
    per.inflation_mode = InflationMode::PerParticipant;
    RoundResult a = settle_round(bids, per);
    CHECK(a.minted == tokens(3));
    for (const TokenAmount& t : a.inflation) CHECK(t == tokens(1));

    AuctionConfig split;
    split.inflation = tokens(1);
    split.inflation_mode = InflationMode::TotalSplit;
    RoundResult b = settle_round(bids, split);
    CHECK(b.minted == tokens(1));
    CHECK(b.inflation[0].subunits() == 333'333'334);
    CHECK(b.inflation[1].subunits() == 333'333'333);
    CHECK(b.inflation[2].subunits() == 333'333'333);
}

TEST_CASE("forfeited stakes burn instead of joining the pot") {
    ReviewAuction auction("P", tokens(1));
    auction.commit("good", commitment_digest("good", tokens(1), Vote::Accept, filled_nonce(1)));
    auction.commit("liar", commitment_digest("liar", tokens(2), Vote::Deny, filled_nonce(2)));
    auction.commit("silent", commitment_digest("silent", tokens(9), Vote::Deny, filled_nonce(3)));
    auction.close_commits();

    auction.reveal("good", tokens(1), Vote::Accept, filled_nonce(1));
    try {
        auction.reveal("liar", tokens(2), Vote::Deny, filled_nonce(7));
        FAIL("expected DigestMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == errc::digest_mismatch);
    }
    // A forfeited commitment cannot try again.
    CHECK_THROWS_AS(auction.reveal("liar", tokens(2), Vote::Deny, filled_nonce(2)), Error);

    Settlement s = auction.settle();
    CHECK(s.outcome == Outcome::Accepted);
    CHECK(s.pot == tokens(1));
    // The liar's claimed stake burns; the silent commitment never put
    // tokens on the table.
    CHECK(s.burned == tokens(2));
    CHECK(s.receipts[1].forfeited);
    CHECK(s.receipts[2].forfeited);
    CHECK(s.receipts[2].stake.is_zero());
    CHECK(s.receipts[0].returned == tokens(1));
}

TEST_CASE("the deposit follows the outcome and the sink setting") {
    SUBCASE("acceptance returns it to the proposer") {
        Settlement s = worked_auction().settle();
        CHECK(s.deposit_returned == tokens(1));
        CHECK(s.burned.is_zero());
    }
    SUBCASE("denial burns it by default") {
        ReviewAuction auction("P", tokens(1));
        auction.commit("S1", commitment_digest("S1", tokens(3), Vote::Deny, filled_nonce(1)));
        auction.close_commits();
        auction.reveal("S1", tokens(3), Vote::Deny, filled_nonce(1));
        Settlement s = auction.settle();
        CHECK(s.outcome == Outcome::Denied);
        CHECK(s.deposit_returned.is_zero());
        CHECK(s.burned == tokens(1));
        CHECK(s.receipts[0].returned == tokens(3));
    }
    SUBCASE("denial can route it to the winners instead") {
        AuctionConfig cfg;
        cfg.deposit_sink = DepositSink::ToWinners;
        ReviewAuction auction("P", tokens(1), cfg);
        auction.commit("S1", commitment_digest("S1", tokens(1), Vote::Deny, filled_nonce(1)));
        auction.commit("S2", commitment_digest("S2", tokens(2), Vote::Deny, filled_nonce(2)));
        auction.commit("S3", commitment_digest("S3", tokens(1), Vote::Accept, filled_nonce(3)));
        auction.close_commits();
        auction.reveal("S1", tokens(1), Vote::Deny, filled_nonce(1));
        auction.reveal("S2", tokens(2), Vote::Deny, filled_nonce(2));
        auction.reveal("S3", tokens(1), Vote::Accept, filled_nonce(3));
        Settlement s = auction.settle();
        CHECK(s.outcome == Outcome::Denied);
        CHECK(s.burned.is_zero());
        CHECK(s.deposit_returned == tokens(1));
        // Pot 4 split 1:2 plus deposit 1 split 1:2 on top.
        CHECK(s.receipts[0].returned.subunits() == 1'333'333'333 + 333'333'333);
        CHECK(s.receipts[1].returned.subunits() == 2'666'666'667 + 666'666'667);
        CHECK(s.receipts[2].returned.is_zero());
    }
    SUBCASE("a tie burns it even when routed to winners") {
        AuctionConfig cfg;
        cfg.deposit_sink = DepositSink::ToWinners;
        ReviewAuction auction("P", tokens(1), cfg);
        auction.commit("S1", commitment_digest("S1", tokens(2), Vote::Deny, filled_nonce(1)));
        auction.commit("S2", commitment_digest("S2", tokens(2), Vote::Accept, filled_nonce(2)));
        auction.close_commits();
        auction.reveal("S1", tokens(2), Vote::Deny, filled_nonce(1));
        auction.reveal("S2", tokens(2), Vote::Accept, filled_nonce(2));
        Settlement s = auction.settle();
        CHECK(s.tie);
        CHECK(s.deposit_returned.is_zero());
        CHECK(s.burned == tokens(1));
    }
}

TEST_CASE("phase and protocol violations raise named errors") {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return errc::io_error;
    };

    try {
        ReviewAuction cheap("P", TokenAmount::parse("0.5"));
        FAIL("expected DepositTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == errc::deposit_too_small);
    }

    ReviewAuction auction("P", tokens(1));
    Digest d = commitment_digest("S1", tokens(1), Vote::Accept, filled_nonce(1));
    auction.commit("S1", d);
    CHECK(code_of([&] { auction.commit("S1", d); }) == errc::duplicate_commit);
    CHECK(code_of([&] { auction.reveal("S1", tokens(1), Vote::Accept, filled_nonce(1)); }) ==
          errc::wrong_phase);
    CHECK(code_of([&] { auction.settle(); }) == errc::wrong_phase);

    auction.close_commits();
    CHECK(code_of([&] { auction.close_commits(); }) == errc::wrong_phase);
    CHECK(code_of([&] { auction.commit("S2", d); }) == errc::wrong_phase);
    CHECK(code_of([&] { auction.reveal("S9", tokens(1), Vote::Accept, filled_nonce(1)); }) ==
          errc::no_such_commitment);
    CHECK(code_of([&] { auction.reveal("S1", TokenAmount{}, Vote::Accept, filled_nonce(1)); }) ==
          errc::parse_error);

    auction.reveal("S1", tokens(1), Vote::Accept, filled_nonce(1));
    CHECK(code_of([&] { auction.reveal("S1", tokens(1), Vote::Accept, filled_nonce(1)); }) ==
          errc::duplicate_commit);

    auction.settle();
    CHECK(code_of([&] { auction.settle(); }) == errc::wrong_phase);
    CHECK(code_of([&] { auction.reveal("S1", tokens(1), Vote::Accept, filled_nonce(1)); }) ==
          errc::wrong_phase);
}

TEST_CASE("settlement requires at least one valid reveal") {
    CHECK_THROWS_AS(settle_round({}, AuctionConfig{}), Error);

    ReviewAuction auction("P", tokens(1));
    auction.commit("S1", commitment_digest("S1", tokens(1), Vote::Accept, filled_nonce(1)));
    auction.close_commits();
    try {
        auction.settle();
        FAIL("expected NoValidReveals");
    } catch (const Error& e) {
        CHECK(e.code() == errc::no_valid_reveals);
    }
}

TEST_CASE("random rounds conserve tokens exactly") {
    Rng rng(314159);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + rng.next_u64() % 6;
        std::vector<RoundBid> bids(n);
        for (std::size_t i = 0; i < n; ++i) {
            bids[i].staker = static_cast<std::uint32_t>(i);
            bids[i].stake =
                TokenAmount::from_subunits(1 + static_cast<std::int64_t>(rng.next_u64() % 10'000'000'000ULL));
            bids[i].vote = rng.next_u64() % 2 == 0 ? Vote::Accept : Vote::Deny;
        }

        AuctionConfig cfg;
        cfg.inflation = TokenAmount::from_subunits(static_cast<std::int64_t>(rng.next_u64() % 3) *
                                                   500'000'000);
        cfg.inflation_mode =
            rng.next_u64() % 2 == 0 ? InflationMode::PerParticipant : InflationMode::TotalSplit;

        std::optional<Outcome> forced;
        if (rng.next_u64() % 3 == 0)
            forced = rng.next_u64() % 2 == 0 ? Outcome::Accepted : Outcome::Denied;

        RoundResult r = settle_round(bids, cfg, forced);

        TokenAmount stakes_in, paid_out, minted_out;
        for (const RoundBid& b : bids) stakes_in += b.stake;
        for (const TokenAmount& t : r.returned) paid_out += t;
        for (const TokenAmount& t : r.inflation) minted_out += t;
        CHECK(r.pot == stakes_in);
        CHECK(paid_out == r.pot);
        CHECK(minted_out == r.minted);
        CHECK(r.ratio >= 0.0);
    }
}

TEST_CASE("random sealed rounds balance stakes, deposit, and burns") {
    Rng rng(271828);
    for (int trial = 0; trial < 120; ++trial) {
        AuctionConfig cfg;
        cfg.inflation = TokenAmount::from_subunits(static_cast<std::int64_t>(rng.next_u64() % 2) *
                                                   1'000'000'000);
        cfg.deposit_sink = rng.next_u64() % 2 == 0 ? DepositSink::Burn : DepositSink::ToWinners;
        TokenAmount deposit =
            TokenAmount::from_subunits(1'000'000'000 + static_cast<std::int64_t>(rng.next_u64() % 2'000'000'000));

        ReviewAuction auction("P", deposit, cfg);
        std::size_t n = 1 + rng.next_u64() % 5;
        std::vector<TokenAmount> stakes(n);
        std::vector<Vote> votes(n);
        std::vector<int> fate(n);
        for (std::size_t i = 0; i < n; ++i) {
            stakes[i] = TokenAmount::from_subunits(
                1 + static_cast<std::int64_t>(rng.next_u64() % 5'000'000'000ULL));
            votes[i] = rng.next_u64() % 2 == 0 ? Vote::Accept : Vote::Deny;
            fate[i] = static_cast<int>(rng.next_u64() % 4);
            std::string staker = "s" + std::to_string(i);
            auction.commit(staker, commitment_digest(staker, stakes[i], votes[i], filled_nonce(1)));
        }
        auction.close_commits();

        TokenAmount money_in = deposit;
        bool any_valid = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::string staker = "s" + std::to_string(i);
            if (fate[i] == 0) continue;  // never reveals, stake stays off the table
            if (fate[i] == 1) {
                // Tampered reveal: the claimed stake is locked and burned.
                try {
                    auction.reveal(staker, stakes[i], votes[i], filled_nonce(2));
                } catch (const Error& e) {
                    CHECK(e.code() == errc::digest_mismatch);
                }
                money_in += stakes[i];
            } else {
                auction.reveal(staker, stakes[i], votes[i], filled_nonce(1));
                money_in += stakes[i];
                any_valid = true;
            }
        }

        if (!any_valid) {
            CHECK_THROWS_AS(auction.settle(), Error);
            continue;
        }
        Settlement s = auction.settle();

        TokenAmount money_out = s.burned;
        for (const Receipt& rcpt : s.receipts) money_out += rcpt.returned;
        if (s.outcome == Outcome::Accepted) money_out += s.deposit_returned;
        CHECK(money_out == money_in);

        TokenAmount minted;
        for (const Receipt& rcpt : s.receipts) minted += rcpt.inflation;
        CHECK(minted == s.minted);
    }
}
