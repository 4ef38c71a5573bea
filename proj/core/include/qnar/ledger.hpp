#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qnar/token.hpp"

namespace qnar {

enum class PayoutStrategy { Immediate, Balanced, Recent };

const char* to_string(PayoutStrategy strategy);
std::optional<PayoutStrategy> payout_strategy_from_string(const std::string& name);

struct Payment {
    std::string user;
    TokenAmount amount;
};

struct PayoutRun {
    PayoutStrategy strategy{};
    std::vector<Payment> payments;
    TokenAmount total;
};

// Book of record for reputation earnings and their conversion into spendable
// tokens. Reputation is credited per period; payout runs settle it into
// balances under one of three strategies:
//   Immediate: one period's earnings paid out one-for-one.
//   Balanced:  every user's unpaid lifetime earnings, scaled down uniformly
//              when the budget cannot cover them.
//   Recent:    a fixed budget split in proportion to exponentially decayed
//              earnings, newer periods weighing more.
class Ledger {
public:
    void record_reputation(const std::string& user, std::int32_t period, TokenAmount qnar);

    TokenAmount balance(const std::string& user) const;
    TokenAmount lifetime_reputation(const std::string& user) const;
    TokenAmount paid_out(const std::string& user) const;
    const std::vector<std::string>& users() const { return users_; }

    void credit(const std::string& user, TokenAmount amount);
    // Throws InsufficientBalance when the account cannot cover the amount.
    void debit(const std::string& user, TokenAmount amount);

    PayoutRun payout_immediate(std::int32_t period);
    PayoutRun payout_balanced(TokenAmount budget);
    PayoutRun payout_recent(TokenAmount budget, double decay, std::int32_t current_period);

    TokenAmount total_balance() const;

    std::vector<std::uint8_t> serialize() const;
    static Ledger deserialize(std::span<const std::uint8_t> bytes);

private:
    struct Earning {
        std::int32_t period;
        TokenAmount qnar;
    };
    struct Account {
        TokenAmount balance;
        TokenAmount lifetime;
        TokenAmount paid;
        std::vector<Earning> earnings;
    };

    Account& account(const std::string& user);
    const Account* find(const std::string& user) const;
    void apply_run(PayoutRun& run, const std::vector<TokenAmount>& shares);

    std::vector<std::string> users_;
    std::unordered_map<std::string, Account> accounts_;
};

} // namespace qnar
