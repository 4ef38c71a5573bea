#include "qnar/token.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace qnar {

TokenAmount TokenAmount::from_tokens(double tokens) {
    if (!std::isfinite(tokens) || tokens < 0)
        fail(errc::overflow_guard, "token amount must be finite and non-negative");
    long double scaled = static_cast<long double>(tokens) * kSubunitsPerToken;
    if (scaled > static_cast<long double>(std::numeric_limits<std::int64_t>::max()))
        fail(errc::overflow_guard, "token amount out of range");
    return from_subunits(static_cast<std::int64_t>(std::llroundl(scaled)));
}

TokenAmount TokenAmount::parse(const std::string& text) {
    if (text.empty())
        fail(errc::parse_error, "empty token amount");
    std::size_t pos = 0;
    std::int64_t whole = 0;
    bool any_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        int d = text[pos] - '0';
        if (whole > (std::numeric_limits<std::int64_t>::max() - d) / 10)
            fail(errc::overflow_guard, "token amount out of range: " + text);
        whole = whole * 10 + d;
        any_digit = true;
        ++pos;
    }
    std::int64_t frac = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (digits < 9)
                frac = frac * 10 + (text[pos] - '0');
            else if (text[pos] != '0')
                fail(errc::parse_error, "more than 9 fractional digits: " + text);
            ++digits;
            ++pos;
            any_digit = true;
        }
        for (int i = digits; i < 9; ++i) frac *= 10;
    }
    if (!any_digit || pos != text.size())
        fail(errc::parse_error, "malformed token amount: " + text);
    if (whole > (std::numeric_limits<std::int64_t>::max() - frac) / kSubunitsPerToken)
        fail(errc::overflow_guard, "token amount out of range: " + text);
    return from_subunits(whole * kSubunitsPerToken + frac);
}

std::string TokenAmount::to_string() const {
    std::int64_t whole = subunits_ / kSubunitsPerToken;
    std::int64_t frac = subunits_ % kSubunitsPerToken;
    char buf[40];
    if (frac == 0) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(whole));
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%lld.%09lld", static_cast<long long>(whole),
                  static_cast<long long>(frac));
    std::string out = buf;
    while (out.back() == '0') out.pop_back();
    return out;
}

TokenAmount TokenAmount::scaled(std::int64_t num, std::int64_t den) const {
    if (den <= 0 || num < 0)
        fail(errc::overflow_guard, "invalid scale factors");
    __int128 prod = static_cast<__int128>(subunits_) * num;
    __int128 out = prod / den;
    if (out > std::numeric_limits<std::int64_t>::max())
        fail(errc::overflow_guard, "token scaling overflow");
    return from_subunits(static_cast<std::int64_t>(out));
}

namespace {

// Hands out `leftover` single subunits to the entries with the largest
// remainder keys, breaking ties toward the lower index.
template <typename Key>
void distribute_remainders(std::vector<TokenAmount>& shares, const std::vector<Key>& remainder,
                           std::int64_t leftover) {
    if (leftover <= 0) return;
    std::vector<std::uint32_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return remainder[a] > remainder[b];
    });
    for (std::int64_t i = 0; i < leftover; ++i)
        shares[order[static_cast<std::size_t>(i) % order.size()]] += TokenAmount::from_subunits(1);
}

} // namespace

std::vector<TokenAmount> apportion(TokenAmount total, std::span<const std::int64_t> weights) {
    std::vector<TokenAmount> shares(weights.size());
    __int128 wsum = 0;
    for (std::int64_t w : weights) {
        if (w < 0) fail(errc::overflow_guard, "negative apportion weight");
        wsum += w;
    }
    if (wsum == 0 || total.is_zero()) return shares;

    std::vector<__int128> rem(weights.size());
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        __int128 prod = static_cast<__int128>(total.subunits()) * weights[i];
        shares[i] = TokenAmount::from_subunits(static_cast<std::int64_t>(prod / wsum));
        rem[i] = prod % wsum;
        assigned += shares[i].subunits();
    }
    distribute_remainders(shares, rem, total.subunits() - assigned);
    return shares;
}

std::vector<TokenAmount> apportion(TokenAmount total, std::span<const double> weights) {
    std::vector<TokenAmount> shares(weights.size());
    long double wsum = 0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0) fail(errc::overflow_guard, "invalid apportion weight");
        wsum += w;
    }
    if (wsum <= 0 || total.is_zero()) return shares;

    std::vector<long double> rem(weights.size());
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        long double exact = static_cast<long double>(total.subunits()) * weights[i] / wsum;
        long double fl = std::floor(exact);
        // Floating error can push a floor past the exact share; clamping
        // keeps the running sum below the total so conservation stays exact.
        std::int64_t sub = static_cast<std::int64_t>(fl);
        if (sub > total.subunits() - assigned) sub = total.subunits() - assigned;
        shares[i] = TokenAmount::from_subunits(sub);
        rem[i] = exact - fl;
        assigned += sub;
    }
    distribute_remainders(shares, rem, total.subunits() - assigned);
    return shares;
}

const char* to_string(errc code) {
    switch (code) {
        case errc::unknown_edge_kind: return "UnknownEdgeKind";
        case errc::dangling_target: return "DanglingTarget";
        case errc::duplicate_node: return "DuplicateNode";
        case errc::event_outside_horizon: return "EventOutsideHorizon";
        case errc::no_convergence: return "NoConvergence";
        case errc::too_large: return "TooLarge";
        case errc::empty_anchor_set: return "EmptyAnchorSet";
        case errc::zero_anchor_mass: return "ZeroAnchorMass";
        case errc::unknown_node: return "UnknownNode";
        case errc::no_contributors: return "NoContributors";
        case errc::zero_total_score: return "ZeroTotalScore";
        case errc::overflow_guard: return "OverflowGuard";
        case errc::deposit_too_small: return "DepositTooSmall";
        case errc::insufficient_balance: return "InsufficientBalance";
        case errc::wrong_phase: return "WrongPhase";
        case errc::duplicate_commit: return "DuplicateCommit";
        case errc::no_such_commitment: return "NoSuchCommitment";
        case errc::digest_mismatch: return "DigestMismatch";
        case errc::no_valid_reveals: return "NoValidReveals";
        case errc::not_a_winner: return "NotAWinner";
        case errc::invalid_distribution_params: return "InvalidDistributionParams";
        case errc::not_enough_players: return "NotEnoughPlayers";
        case errc::degenerate_returns: return "DegenerateReturns";
        case errc::division_by_zero: return "DivisionByZero";
        case errc::parse_error: return "ParseError";
        case errc::unknown_key: return "UnknownKey";
        case errc::checksum_mismatch: return "ChecksumMismatch";
        case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace qnar
