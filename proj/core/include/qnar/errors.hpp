#pragma once

#include <stdexcept>
#include <string>

namespace qnar {

/// Stable error codes shared by all modules. CLI maps these to exit codes.
enum class errc {
    // event / graph construction
    unknown_edge_kind,
    dangling_target,
    duplicate_node,
    event_outside_horizon,
    // rank engine
    no_convergence,
    too_large,
    empty_anchor_set,
    zero_anchor_mass,
    // credrank
    unknown_node,
    no_contributors,
    zero_total_score,
    // ledger / token
    overflow_guard,
    // auction game
    deposit_too_small,
    insufficient_balance,
    wrong_phase,
    duplicate_commit,
    no_such_commitment,
    digest_mismatch,
    no_valid_reveals,
    not_a_winner,
    // simulation
    invalid_distribution_params,
    not_enough_players,
    degenerate_returns,
    division_by_zero,
    // io / config
    parse_error,
    unknown_key,
    checksum_mismatch,
    io_error,
};

const char* to_string(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, std::string message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, std::string message) {
    throw Error(code, std::move(message));
}

/// Thrown by the power iteration when the residual is still above tol after
/// max_iter sweeps; carries the diagnostics the caller needs to react.
class ConvergenceError : public Error {
public:
    ConvergenceError(double residual, double tol, int iterations, std::string message)
        : Error(errc::no_convergence, std::move(message)),
          residual(residual), tol(tol), iterations(iterations) {}

    double residual;
    double tol;
    int iterations;
};

} // namespace qnar
