#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qnar/errors.hpp"

namespace qnar {

/// Non-negative fixed-point token quantity, 1 token = 10^9 subunits.
/// All ledger and auction arithmetic happens on exact integer subunits;
/// doubles appear only at reporting boundaries.
class TokenAmount {
public:
    static constexpr std::int64_t kSubunitsPerToken = 1'000'000'000;

    constexpr TokenAmount() = default;

    static TokenAmount from_subunits(std::int64_t subunits) {
        if (subunits < 0)
            fail(errc::overflow_guard, "token amount cannot be negative");
        TokenAmount a;
        a.subunits_ = subunits;
        return a;
    }

    static TokenAmount from_tokens(std::int64_t tokens) {
        if (tokens < 0 || tokens > std::numeric_limits<std::int64_t>::max() / kSubunitsPerToken)
            fail(errc::overflow_guard, "token amount out of range");
        return from_subunits(tokens * kSubunitsPerToken);
    }

    /// Nearest-subunit quantization of a real-valued token count.
    static TokenAmount from_tokens(double tokens);

    /// Exact decimal parse, e.g. "1.5", "0.000000001", "12".
    static TokenAmount parse(const std::string& text);

    constexpr std::int64_t subunits() const noexcept { return subunits_; }
    double tokens() const noexcept { return static_cast<double>(subunits_) / kSubunitsPerToken; }
    constexpr bool is_zero() const noexcept { return subunits_ == 0; }

    /// Exact decimal rendering with trailing zeros trimmed ("1.666666667", "2").
    std::string to_string() const;

    TokenAmount operator+(TokenAmount rhs) const {
        std::int64_t out = 0;
        if (__builtin_add_overflow(subunits_, rhs.subunits_, &out))
            fail(errc::overflow_guard, "token addition overflow");
        return from_subunits(out);
    }

    TokenAmount operator-(TokenAmount rhs) const {
        if (rhs.subunits_ > subunits_)
            fail(errc::overflow_guard, "token subtraction below zero");
        return from_subunits(subunits_ - rhs.subunits_);
    }

    TokenAmount& operator+=(TokenAmount rhs) { return *this = *this + rhs; }
    TokenAmount& operator-=(TokenAmount rhs) { return *this = *this - rhs; }

    auto operator<=>(const TokenAmount&) const = default;

    /// floor(amount * num / den) in exact 128-bit arithmetic.
    TokenAmount scaled(std::int64_t num, std::int64_t den) const;

private:
    std::int64_t subunits_ = 0;
};

/// Splits `total` across non-negative integer weights so the shares sum to
/// `total` exactly. Uses floor(total*w_i/W) plus largest-remainder rounding;
/// remainder ties go to the lower index. All-zero weights yield all-zero
/// shares.
std::vector<TokenAmount> apportion(TokenAmount total, std::span<const std::int64_t> weights);

/// Same contract for real-valued weights (weights must be finite and >= 0).
/// Conservation is structural: shares always sum to exactly `total` when any
/// weight is positive.
std::vector<TokenAmount> apportion(TokenAmount total, std::span<const double> weights);

} // namespace qnar
