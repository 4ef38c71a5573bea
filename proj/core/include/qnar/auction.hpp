#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnar/token.hpp"

namespace qnar {

enum class Vote : std::uint8_t { Accept = 0x01, Deny = 0xFF };
enum class Phase { Open, Reveal, Settled };
enum class Outcome { Accepted, Denied };
enum class InflationMode { PerParticipant, TotalSplit };
enum class DepositSink { Burn, ToWinners };

const char* to_string(Vote v);
const char* to_string(Phase p);
const char* to_string(Outcome o);

using Digest = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 32>;

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

Digest sha256(std::span<const std::uint8_t> bytes);

// SHA-256 over the canonical commitment encoding: the staker id in UTF-8, a
// zero separator, the stake as a 16-byte big-endian subunit count, the vote
// byte, and the 32-byte nonce.
Digest commitment_digest(const std::string& staker, TokenAmount stake, Vote vote,
                         const Nonce& nonce);

struct AuctionConfig {
    TokenAmount min_deposit = TokenAmount::from_tokens(std::int64_t{1});
    // Reward minted for voting; PerParticipant hands `inflation` to every
    // valid revealer, TotalSplit divides it equally among them.
    TokenAmount inflation;
    InflationMode inflation_mode = InflationMode::PerParticipant;
    // Where a denied proposal's deposit goes. ToWinners splits it with the
    // payout; when a tie leaves no winners it burns instead.
    DepositSink deposit_sink = DepositSink::Burn;
};

struct RoundBid {
    std::uint32_t staker = 0;
    TokenAmount stake;
    Vote vote = Vote::Accept;
};

struct RoundResult {
    Outcome outcome = Outcome::Denied;
    bool tie = false;
    // Stake-weighted vote sum in subunits, split into sign and magnitude so
    // it stays exact: positive accepts, negative denies, zero ties.
    int decision_sign = 0;
    TokenAmount decision_magnitude;
    TokenAmount pot;
    TokenAmount minted;
    // Parallel to the input bids: stake refund plus any winnings, and the
    // minted voting reward.
    std::vector<TokenAmount> returned;
    std::vector<TokenAmount> inflation;
    // Losing stake per unit of winning stake; zero when nobody lost.
    double ratio = 0.0;
};

// Settles one round of stakes directly. Without a forced outcome the decision
// is the sign of the stake-weighted vote sum, a tie denying with a full
// refund. Winners split the whole pot in proportion to their stakes, with
// remainder subunits going to the largest fractional shares. A forced outcome
// skips the vote count (used when the ground truth is sampled externally);
// if it leaves no winners everyone is refunded.
RoundResult settle_round(std::span<const RoundBid> bids, const AuctionConfig& config,
                         std::optional<Outcome> forced = std::nullopt);

struct Receipt {
    std::string staker;
    TokenAmount stake;
    Vote vote = Vote::Accept;
    bool revealed = false;
    bool forfeited = false;
    TokenAmount returned;
    TokenAmount inflation;
};

struct Settlement {
    Outcome outcome = Outcome::Denied;
    bool tie = false;
    int decision_sign = 0;
    TokenAmount decision_magnitude;
    TokenAmount pot;
    TokenAmount burned;
    TokenAmount minted;
    // Deposit amount sent back to the proposer (acceptance) or folded into
    // the winners' payout (denial with DepositSink::ToWinners).
    TokenAmount deposit_returned;
    double ratio = 0.0;
    std::vector<Receipt> receipts;
};

// Sealed-bid review auction: stakers commit digests while the round is Open,
// disclose stake and vote during Reveal, and the pot settles once. A reveal
// that does not match its commitment forfeits the stake, as does an unopened
// commitment; forfeited stakes burn rather than joining the pot.
class ReviewAuction {
public:
    ReviewAuction(std::string proposer, TokenAmount deposit, AuctionConfig config = {});

    void commit(const std::string& staker, const Digest& digest);
    void close_commits();
    void reveal(const std::string& staker, TokenAmount stake, Vote vote, const Nonce& nonce);
    Settlement settle();

    Phase phase() const { return phase_; }
    const std::string& proposer() const { return proposer_; }

private:
    struct Entry {
        std::string staker;
        Digest digest{};
        bool revealed = false;
        bool forfeited = false;
        TokenAmount stake;
        Vote vote = Vote::Accept;
    };

    Entry* find(const std::string& staker);

    std::string proposer_;
    TokenAmount deposit_;
    AuctionConfig config_;
    Phase phase_ = Phase::Open;
    std::vector<Entry> entries_;
};

struct AuctionAction {
    enum class Op { Propose, Commit, CloseCommits, Reveal, Settle };
    Op op = Op::Propose;
    std::string actor;
    TokenAmount amount;
    Vote vote = Vote::Accept;
    Digest digest{};
    Nonce nonce{};
};

// Replays a journal of actions from proposal through settlement, enforcing
// the same phase rules as the live object. The journal must start with a
// Propose and end with a Settle. A reveal that fails its digest check is not
// a protocol violation: the forfeit is recorded and the replay carries on.
Settlement replay_auction(std::span<const AuctionAction> actions, const AuctionConfig& config);

} // namespace qnar
