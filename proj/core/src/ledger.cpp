#include "qnar/ledger.hpp"

#include <algorithm>
#include <cmath>

#include "qnar/errors.hpp"

namespace qnar {

const char* to_string(PayoutStrategy strategy) {
    switch (strategy) {
        case PayoutStrategy::Immediate: return "immediate";
        case PayoutStrategy::Balanced: return "balanced";
        case PayoutStrategy::Recent: return "recent";
    }
    return "?";
}

std::optional<PayoutStrategy> payout_strategy_from_string(const std::string& name) {
    if (name == "immediate") return PayoutStrategy::Immediate;
    if (name == "balanced") return PayoutStrategy::Balanced;
    if (name == "recent") return PayoutStrategy::Recent;
    return std::nullopt;
}

Ledger::Account& Ledger::account(const std::string& user) {
    auto [it, inserted] = accounts_.try_emplace(user);
    if (inserted) users_.push_back(user);
    return it->second;
}

const Ledger::Account* Ledger::find(const std::string& user) const {
    auto it = accounts_.find(user);
    return it == accounts_.end() ? nullptr : &it->second;
}

void Ledger::record_reputation(const std::string& user, std::int32_t period, TokenAmount qnar) {
    Account& acc = account(user);
    acc.lifetime += qnar;
    acc.earnings.push_back({period, qnar});
}

TokenAmount Ledger::balance(const std::string& user) const {
    const Account* acc = find(user);
    return acc ? acc->balance : TokenAmount{};
}

TokenAmount Ledger::lifetime_reputation(const std::string& user) const {
    const Account* acc = find(user);
    return acc ? acc->lifetime : TokenAmount{};
}

TokenAmount Ledger::paid_out(const std::string& user) const {
    const Account* acc = find(user);
    return acc ? acc->paid : TokenAmount{};
}

void Ledger::credit(const std::string& user, TokenAmount amount) {
    account(user).balance += amount;
}

void Ledger::debit(const std::string& user, TokenAmount amount) {
    Account& acc = account(user);
    if (acc.balance < amount)
        fail(errc::insufficient_balance,
             user + " holds " + acc.balance.to_string() + ", needs " + amount.to_string());
    acc.balance -= amount;
}

void Ledger::apply_run(PayoutRun& run, const std::vector<TokenAmount>& shares) {
    for (std::size_t i = 0; i < users_.size(); ++i) {
        if (shares[i].is_zero()) continue;
        Account& acc = accounts_.at(users_[i]);
        acc.balance += shares[i];
        acc.paid += shares[i];
        run.payments.push_back({users_[i], shares[i]});
        run.total += shares[i];
    }
}

PayoutRun Ledger::payout_immediate(std::int32_t period) {
    PayoutRun run{PayoutStrategy::Immediate, {}, {}};
    std::vector<TokenAmount> shares(users_.size());
    for (std::size_t i = 0; i < users_.size(); ++i) {
        for (const Earning& e : accounts_.at(users_[i]).earnings)
            if (e.period == period) shares[i] += e.qnar;
    }
    apply_run(run, shares);
    return run;
}

PayoutRun Ledger::payout_balanced(TokenAmount budget) {
    PayoutRun run{PayoutStrategy::Balanced, {}, {}};
    std::vector<std::int64_t> owed(users_.size(), 0);
    __int128 owed_sum = 0;
    for (std::size_t i = 0; i < users_.size(); ++i) {
        const Account& acc = accounts_.at(users_[i]);
        if (acc.lifetime > acc.paid) owed[i] = (acc.lifetime - acc.paid).subunits();
        owed_sum += owed[i];
    }

    std::vector<TokenAmount> shares(users_.size());
    if (owed_sum <= budget.subunits()) {
        for (std::size_t i = 0; i < users_.size(); ++i)
            shares[i] = TokenAmount::from_subunits(owed[i]);
    } else {
        shares = apportion(budget, owed);
    }
    apply_run(run, shares);
    return run;
}

PayoutRun Ledger::payout_recent(TokenAmount budget, double decay, std::int32_t current_period) {
    if (!(decay >= 0.0) || !std::isfinite(decay))
        fail(errc::invalid_distribution_params, "decay must be non-negative and finite");
    PayoutRun run{PayoutStrategy::Recent, {}, {}};
    std::vector<double> weights(users_.size(), 0.0);
    for (std::size_t i = 0; i < users_.size(); ++i) {
        for (const Earning& e : accounts_.at(users_[i]).earnings) {
            if (e.period > current_period) continue;
            weights[i] += std::pow(decay, static_cast<double>(current_period - e.period)) *
                          e.qnar.tokens();
        }
    }
    apply_run(run, apportion(budget, weights));
    return run;
}

TokenAmount Ledger::total_balance() const {
    TokenAmount total;
    for (const auto& [user, acc] : accounts_) total += acc.balance;
    return total;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_str(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

struct ByteReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void need(std::size_t n) {
        if (pos + n > bytes.size()) fail(errc::parse_error, "truncated ledger bytes");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    std::string str() {
        std::uint32_t len = u32();
        need(len);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), len);
        pos += len;
        return s;
    }
};

} // namespace

std::vector<std::uint8_t> Ledger::serialize() const {
    std::vector<std::uint8_t> out;
    put_u32(out, static_cast<std::uint32_t>(users_.size()));
    for (const std::string& user : users_) {
        const Account& acc = accounts_.at(user);
        put_str(out, user);
        put_u64(out, static_cast<std::uint64_t>(acc.balance.subunits()));
        put_u64(out, static_cast<std::uint64_t>(acc.lifetime.subunits()));
        put_u64(out, static_cast<std::uint64_t>(acc.paid.subunits()));
        put_u32(out, static_cast<std::uint32_t>(acc.earnings.size()));
        for (const Earning& e : acc.earnings) {
            put_u32(out, static_cast<std::uint32_t>(e.period));
            put_u64(out, static_cast<std::uint64_t>(e.qnar.subunits()));
        }
    }
    return out;
}

Ledger Ledger::deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r{bytes};
    Ledger ledger;
    std::uint32_t user_count = r.u32();
    for (std::uint32_t i = 0; i < user_count; ++i) {
        std::string user = r.str();
        Account& acc = ledger.account(user);
        acc.balance = TokenAmount::from_subunits(static_cast<std::int64_t>(r.u64()));
        acc.lifetime = TokenAmount::from_subunits(static_cast<std::int64_t>(r.u64()));
        acc.paid = TokenAmount::from_subunits(static_cast<std::int64_t>(r.u64()));
        std::uint32_t n = r.u32();
        acc.earnings.reserve(n);
        for (std::uint32_t j = 0; j < n; ++j) {
            auto period = static_cast<std::int32_t>(r.u32());
            auto qnar = TokenAmount::from_subunits(static_cast<std::int64_t>(r.u64()));
            acc.earnings.push_back({period, qnar});
        }
    }
    if (r.pos != bytes.size()) fail(errc::parse_error, "trailing bytes after ledger");
    return ledger;
}

} // namespace qnar
