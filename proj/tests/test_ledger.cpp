#include <doctest.h>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qnar/errors.hpp"
#include "qnar/ledger.hpp"
#include "qnar/rng.hpp"
#include "qnar/token.hpp"

using namespace qnar;

namespace {

TokenAmount tokens(std::int64_t whole) { return TokenAmount::from_tokens(whole); }

} // namespace

TEST_CASE("strategy names round trip") {
    for (PayoutStrategy s :
         {PayoutStrategy::Immediate, PayoutStrategy::Balanced, PayoutStrategy::Recent}) {
        auto back = payout_strategy_from_string(to_string(s));
        REQUIRE(back.has_value());
        CHECK(*back == s);
    }
    CHECK(!payout_strategy_from_string("bogus").has_value());
}

TEST_CASE("recording reputation tracks lifetime but not balance") {
    Ledger ledger;
    ledger.record_reputation("alice", 1, TokenAmount::parse("3.5"));
    ledger.record_reputation("bob", 1, TokenAmount::parse("1.25"));
    ledger.record_reputation("alice", 2, tokens(2));

    CHECK(ledger.users() == std::vector<std::string>{"alice", "bob"});
    CHECK(ledger.lifetime_reputation("alice") == TokenAmount::parse("5.5"));
    CHECK(ledger.lifetime_reputation("bob") == TokenAmount::parse("1.25"));
    CHECK(ledger.balance("alice").is_zero());
    CHECK(ledger.paid_out("alice").is_zero());
    CHECK(ledger.balance("ghost").is_zero());
    CHECK(ledger.lifetime_reputation("ghost").is_zero());
    CHECK(ledger.total_balance().is_zero());
}

TEST_CASE("immediate payout settles one period one-for-one") {
    Ledger ledger;
    ledger.record_reputation("alice", 1, TokenAmount::parse("3.5"));
    ledger.record_reputation("bob", 1, TokenAmount::parse("1.25"));
    ledger.record_reputation("alice", 2, tokens(2));

    PayoutRun run = ledger.payout_immediate(1);
    CHECK(run.strategy == PayoutStrategy::Immediate);
    REQUIRE(run.payments.size() == 2);
    CHECK(run.payments[0].user == "alice");
    CHECK(run.payments[0].amount == TokenAmount::parse("3.5"));
    CHECK(run.payments[1].user == "bob");
    CHECK(run.payments[1].amount == TokenAmount::parse("1.25"));
    CHECK(run.total == TokenAmount::parse("4.75"));
    CHECK(ledger.balance("alice") == TokenAmount::parse("3.5"));
    CHECK(ledger.paid_out("bob") == TokenAmount::parse("1.25"));

    PayoutRun second = ledger.payout_immediate(2);
    REQUIRE(second.payments.size() == 1);
    CHECK(second.payments[0].user == "alice");
    CHECK(second.payments[0].amount == tokens(2));

    PayoutRun empty = ledger.payout_immediate(99);
    CHECK(empty.payments.empty());
    CHECK(empty.total.is_zero());
    CHECK(ledger.total_balance() == TokenAmount::parse("6.75"));
}

TEST_CASE("balanced payout pays owed in full when the budget covers it") {
    Ledger ledger;
    ledger.record_reputation("alice", 1, tokens(3));
    ledger.record_reputation("bob", 1, tokens(1));

    PayoutRun run = ledger.payout_balanced(tokens(10));
    CHECK(run.strategy == PayoutStrategy::Balanced);
    CHECK(run.total == tokens(4));
    CHECK(ledger.balance("alice") == tokens(3));
    CHECK(ledger.balance("bob") == tokens(1));

    // Nothing is owed anymore, so a second run pays nothing.
    PayoutRun again = ledger.payout_balanced(tokens(10));
    CHECK(again.payments.empty());
    CHECK(again.total.is_zero());
}

TEST_CASE("balanced payout scales down by largest remainder when short") {
    Ledger ledger;
    ledger.record_reputation("alice", 1, tokens(2));
    ledger.record_reputation("bob", 1, tokens(1));

    PayoutRun run = ledger.payout_balanced(tokens(1));
    REQUIRE(run.payments.size() == 2);
    CHECK(run.payments[0].amount.subunits() == 666'666'667);
    CHECK(run.payments[1].amount.subunits() == 333'333'333);
    CHECK(run.total == tokens(1));

    // The shortfall stays owed and a big enough budget clears it exactly.
    PayoutRun rest = ledger.payout_balanced(tokens(100));
    REQUIRE(rest.payments.size() == 2);
    CHECK(rest.payments[0].amount.subunits() == 1'333'333'333);
    CHECK(rest.payments[1].amount.subunits() == 666'666'667);
    CHECK(ledger.paid_out("alice") == tokens(2));
    CHECK(ledger.paid_out("bob") == tokens(1));
    CHECK(ledger.payout_balanced(tokens(100)).payments.empty());
}

TEST_CASE("recent payout splits the budget by decayed earnings") {
    Ledger ledger;
    ledger.record_reputation("alice", 1, tokens(1));
    ledger.record_reputation("alice", 2, tokens(1));
    ledger.record_reputation("bob", 1, tokens(2));
    ledger.record_reputation("carol", 3, tokens(100));

    // With decay 0.5 at period 2: alice weighs 0.5 + 1 = 1.5, bob 0.5 * 2 = 1,
    // and carol's period-3 earning is still in the future so she gets nothing.
    PayoutRun run = ledger.payout_recent(tokens(5), 0.5, 2);
    CHECK(run.strategy == PayoutStrategy::Recent);
    REQUIRE(run.payments.size() == 2);
    CHECK(run.payments[0].user == "alice");
    CHECK(run.payments[0].amount == tokens(3));
    CHECK(run.payments[1].user == "bob");
    CHECK(run.payments[1].amount == tokens(2));
    CHECK(run.total == tokens(5));
}

TEST_CASE("recent payout pays nothing when every weight is zero") {
    Ledger ledger;
    ledger.record_reputation("alice", 5, tokens(7));

    PayoutRun run = ledger.payout_recent(tokens(3), 0.9, 2);
    CHECK(run.payments.empty());
    CHECK(run.total.is_zero());
}

TEST_CASE("recent payout validates the decay") {
    Ledger ledger;
    ledger.record_reputation("alice", 1, tokens(1));
    CHECK_THROWS_AS(ledger.payout_recent(tokens(1), -0.5, 1), Error);
    CHECK_THROWS_AS(ledger.payout_recent(tokens(1), std::numeric_limits<double>::quiet_NaN(), 1),
                    Error);
    CHECK_THROWS_AS(ledger.payout_recent(tokens(1), std::numeric_limits<double>::infinity(), 1),
                    Error);
}

TEST_CASE("debit refuses to overdraw") {
    Ledger ledger;
    ledger.credit("alice", tokens(5));
    ledger.debit("alice", tokens(3));
    CHECK(ledger.balance("alice") == tokens(2));

    try {
        ledger.debit("alice", tokens(5));
        FAIL("expected InsufficientBalance");
    } catch (const Error& e) {
        CHECK(e.code() == errc::insufficient_balance);
    }
    CHECK(ledger.balance("alice") == tokens(2));
    CHECK_THROWS_AS(ledger.debit("ghost", TokenAmount::from_subunits(1)), Error);
}

TEST_CASE("total balance tracks every credit, debit, and payout") {
    Rng rng(20260815);
    Ledger ledger;
    TokenAmount expected;

    for (int step = 0; step < 200; ++step) {
        std::string user = "u" + std::to_string(rng.next_u64() % 7);
        switch (rng.next_u64() % 4) {
            case 0:
                ledger.record_reputation(user, static_cast<std::int32_t>(rng.next_u64() % 10),
                                         TokenAmount::from_subunits(
                                             static_cast<std::int64_t>(rng.next_u64() % 1'000'000'000)));
                break;
            case 1: {
                TokenAmount amount =
                    TokenAmount::from_subunits(static_cast<std::int64_t>(rng.next_u64() % 1'000'000));
                ledger.credit(user, amount);
                expected += amount;
                break;
            }
            case 2: {
                TokenAmount balance = ledger.balance(user);
                if (balance.is_zero()) break;
                TokenAmount amount = TokenAmount::from_subunits(
                    static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(balance.subunits())) +
                    1);
                ledger.debit(user, amount);
                expected -= amount;
                break;
            }
            case 3: {
                TokenAmount budget =
                    TokenAmount::from_subunits(static_cast<std::int64_t>(rng.next_u64() % 2'000'000'000));
                PayoutRun run = rng.next_u64() % 2 == 0
                                    ? ledger.payout_balanced(budget)
                                    : ledger.payout_recent(budget, 0.8,
                                                           static_cast<std::int32_t>(rng.next_u64() % 10));
                TokenAmount paid;
                for (const Payment& p : run.payments) paid += p.amount;
                CHECK(paid == run.total);
                expected += run.total;
                break;
            }
        }
        CHECK(ledger.total_balance() == expected);
    }
}

TEST_CASE("serialization round trips byte for byte") {
    Ledger ledger;
    ledger.record_reputation("alice", 1, TokenAmount::parse("3.5"));
    ledger.record_reputation("bob", 2, TokenAmount::parse("0.000000001"));
    ledger.credit("alice", tokens(4));
    ledger.debit("alice", tokens(1));
    ledger.payout_immediate(1);
    ledger.payout_recent(tokens(2), 0.5, 2);

    std::vector<std::uint8_t> bytes = ledger.serialize();
    Ledger copy = Ledger::deserialize(bytes);
    CHECK(copy.serialize() == bytes);
    CHECK(copy.users() == ledger.users());
    CHECK(copy.balance("alice") == ledger.balance("alice"));
    CHECK(copy.lifetime_reputation("bob") == ledger.lifetime_reputation("bob"));
    CHECK(copy.paid_out("alice") == ledger.paid_out("alice"));

    // Payout history survives the round trip, so immediate runs still work.
    PayoutRun run = copy.payout_immediate(2);
    REQUIRE(run.payments.size() == 1);
    CHECK(run.payments[0].amount == TokenAmount::parse("0.000000001"));

    std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 3);
    CHECK_THROWS_AS(Ledger::deserialize(truncated), Error);

    std::vector<std::uint8_t> padded = bytes;
    padded.push_back(0);
    CHECK_THROWS_AS(Ledger::deserialize(padded), Error);
}
