#include "qnar/auction.hpp"

#include <openssl/evp.h>

#include "qnar/errors.hpp"

namespace qnar {

const char* to_string(Vote v) { return v == Vote::Accept ? "accept" : "deny"; }

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Open: return "open";
        case Phase::Reveal: return "reveal";
        case Phase::Settled: return "settled";
    }
    return "?";
}

const char* to_string(Outcome o) { return o == Outcome::Accepted ? "accepted" : "denied"; }

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) fail(errc::parse_error, "odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        fail(errc::parse_error, std::string("invalid hex digit: ") + c);
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

Digest sha256(std::span<const std::uint8_t> bytes) {
    Digest digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != digest.size())
        fail(errc::io_error, "SHA-256 digest failed");
    return digest;
}

Digest commitment_digest(const std::string& staker, TokenAmount stake, Vote vote,
                         const Nonce& nonce) {
    std::vector<std::uint8_t> msg;
    msg.reserve(staker.size() + 1 + 16 + 1 + nonce.size());
    msg.insert(msg.end(), staker.begin(), staker.end());
    msg.push_back(0x00);
    auto sub = static_cast<std::uint64_t>(stake.subunits());
    for (int i = 0; i < 8; ++i) msg.push_back(0x00);
    for (int i = 7; i >= 0; --i) msg.push_back(static_cast<std::uint8_t>(sub >> (8 * i)));
    msg.push_back(static_cast<std::uint8_t>(vote));
    msg.insert(msg.end(), nonce.begin(), nonce.end());
    return sha256(msg);
}

RoundResult settle_round(std::span<const RoundBid> bids, const AuctionConfig& config,
                         std::optional<Outcome> forced) {
    if (bids.empty()) fail(errc::no_valid_reveals, "no bids to settle");

    RoundResult result;
    result.returned.resize(bids.size());
    result.inflation.resize(bids.size());

    __int128 vote_sum = 0;
    for (const RoundBid& b : bids) {
        result.pot += b.stake;
        vote_sum += (b.vote == Vote::Accept ? 1 : -1) * static_cast<__int128>(b.stake.subunits());
    }
    result.decision_sign = vote_sum > 0 ? 1 : vote_sum < 0 ? -1 : 0;
    result.decision_magnitude = TokenAmount::from_subunits(
        static_cast<std::int64_t>(vote_sum < 0 ? -vote_sum : vote_sum));

    bool refund_all = false;
    if (forced) {
        result.outcome = *forced;
    } else if (vote_sum > 0) {
        result.outcome = Outcome::Accepted;
    } else if (vote_sum < 0) {
        result.outcome = Outcome::Denied;
    } else {
        result.outcome = Outcome::Denied;
        result.tie = true;
        refund_all = true;
    }

    Vote winning_vote = result.outcome == Outcome::Accepted ? Vote::Accept : Vote::Deny;
    std::vector<std::size_t> winners;
    __int128 winner_stake = 0, loser_stake = 0;
    if (!refund_all) {
        for (std::size_t i = 0; i < bids.size(); ++i) {
            if (bids[i].vote == winning_vote) {
                winners.push_back(i);
                winner_stake += bids[i].stake.subunits();
            } else {
                loser_stake += bids[i].stake.subunits();
            }
        }
        if (winners.empty()) refund_all = true;
    }

    if (refund_all) {
        for (std::size_t i = 0; i < bids.size(); ++i) result.returned[i] = bids[i].stake;
    } else {
        std::vector<std::int64_t> stakes(winners.size());
        for (std::size_t w = 0; w < winners.size(); ++w)
            stakes[w] = bids[winners[w]].stake.subunits();
        std::vector<TokenAmount> shares = apportion(result.pot, stakes);
        for (std::size_t w = 0; w < winners.size(); ++w) result.returned[winners[w]] = shares[w];
        result.ratio = static_cast<double>(loser_stake) / static_cast<double>(winner_stake);
    }

    if (!config.inflation.is_zero()) {
        if (config.inflation_mode == InflationMode::PerParticipant) {
            for (std::size_t i = 0; i < bids.size(); ++i) {
                result.inflation[i] = config.inflation;
                result.minted += config.inflation;
            }
        } else {
            std::vector<std::int64_t> ones(bids.size(), 1);
            result.inflation = apportion(config.inflation, ones);
            result.minted = config.inflation;
        }
    }
    return result;
}

ReviewAuction::ReviewAuction(std::string proposer, TokenAmount deposit, AuctionConfig config)
    : proposer_(std::move(proposer)), deposit_(deposit), config_(config) {
    if (deposit < config_.min_deposit)
        fail(errc::deposit_too_small, "deposit " + deposit.to_string() + " below minimum " +
                                          config_.min_deposit.to_string());
}

ReviewAuction::Entry* ReviewAuction::find(const std::string& staker) {
    for (Entry& e : entries_)
        if (e.staker == staker) return &e;
    return nullptr;
}

void ReviewAuction::commit(const std::string& staker, const Digest& digest) {
    if (phase_ != Phase::Open)
        fail(errc::wrong_phase, std::string("cannot commit while ") + to_string(phase_));
    if (find(staker)) fail(errc::duplicate_commit, staker + " already committed");
    entries_.push_back(Entry{staker, digest, false, false, {}, Vote::Accept});
}

void ReviewAuction::close_commits() {
    if (phase_ != Phase::Open)
        fail(errc::wrong_phase, std::string("cannot close commits while ") + to_string(phase_));
    phase_ = Phase::Reveal;
}

void ReviewAuction::reveal(const std::string& staker, TokenAmount stake, Vote vote,
                           const Nonce& nonce) {
    if (phase_ != Phase::Reveal)
        fail(errc::wrong_phase, std::string("cannot reveal while ") + to_string(phase_));
    Entry* entry = find(staker);
    if (!entry) fail(errc::no_such_commitment, staker + " never committed");
    if (entry->revealed) fail(errc::duplicate_commit, staker + " already revealed");
    if (entry->forfeited) fail(errc::digest_mismatch, staker + " forfeited this commitment");
    if (stake.is_zero()) fail(errc::parse_error, "stake must be positive");

    if (commitment_digest(staker, stake, vote, nonce) != entry->digest) {
        entry->forfeited = true;
        entry->stake = stake;
        fail(errc::digest_mismatch, staker + " revealed values that do not match the commitment");
    }
    entry->revealed = true;
    entry->stake = stake;
    entry->vote = vote;
}

Settlement ReviewAuction::settle() {
    if (phase_ != Phase::Reveal)
        fail(errc::wrong_phase, std::string("cannot settle while ") + to_string(phase_));

    std::vector<RoundBid> bids;
    std::vector<std::size_t> bid_entry;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        Entry& e = entries_[i];
        if (!e.revealed) {
            e.forfeited = true;
            continue;
        }
        bids.push_back(RoundBid{static_cast<std::uint32_t>(i), e.stake, e.vote});
        bid_entry.push_back(i);
    }
    if (bids.empty()) fail(errc::no_valid_reveals, "every commitment was forfeited");

    RoundResult round = settle_round(bids, config_);

    Settlement s;
    s.outcome = round.outcome;
    s.tie = round.tie;
    s.decision_sign = round.decision_sign;
    s.decision_magnitude = round.decision_magnitude;
    s.pot = round.pot;
    s.minted = round.minted;
    s.ratio = round.ratio;
    s.receipts.reserve(entries_.size());
    for (const Entry& e : entries_)
        s.receipts.push_back(Receipt{e.staker, e.stake, e.vote, e.revealed, e.forfeited, {}, {}});
    for (std::size_t b = 0; b < bids.size(); ++b) {
        s.receipts[bid_entry[b]].returned = round.returned[b];
        s.receipts[bid_entry[b]].inflation = round.inflation[b];
    }

    // A reveal that was attempted but mismatched recorded its claimed stake;
    // an entry that never revealed has nothing on the table. Either way the
    // stake behind a forfeited commitment is burned, never pooled.
    for (const Entry& e : entries_)
        if (e.forfeited) s.burned += e.stake;

    if (s.outcome == Outcome::Accepted) {
        s.deposit_returned = deposit_;
    } else {
        std::vector<std::size_t> winner_bids;
        for (std::size_t b = 0; b < bids.size(); ++b)
            if (!round.tie && bids[b].vote == Vote::Deny) winner_bids.push_back(b);
        if (config_.deposit_sink == DepositSink::ToWinners && !winner_bids.empty()) {
            std::vector<std::int64_t> stakes(winner_bids.size());
            for (std::size_t w = 0; w < winner_bids.size(); ++w)
                stakes[w] = bids[winner_bids[w]].stake.subunits();
            std::vector<TokenAmount> extra = apportion(deposit_, stakes);
            for (std::size_t w = 0; w < winner_bids.size(); ++w)
                s.receipts[bid_entry[winner_bids[w]]].returned += extra[w];
            s.deposit_returned = deposit_;
        } else {
            s.burned += deposit_;
        }
    }

    phase_ = Phase::Settled;
    return s;
}

Settlement replay_auction(std::span<const AuctionAction> actions, const AuctionConfig& config) {
    using Op = AuctionAction::Op;
    if (actions.empty() || actions.front().op != Op::Propose)
        fail(errc::wrong_phase, "journal must start with a proposal");

    ReviewAuction auction(actions.front().actor, actions.front().amount, config);
    for (std::size_t i = 1; i < actions.size(); ++i) {
        const AuctionAction& a = actions[i];
        switch (a.op) {
            case Op::Propose:
                fail(errc::wrong_phase, "journal contains a second proposal");
            case Op::Commit:
                auction.commit(a.actor, a.digest);
                break;
            case Op::CloseCommits:
                auction.close_commits();
                break;
            case Op::Reveal:
                try {
                    auction.reveal(a.actor, a.amount, a.vote, a.nonce);
                } catch (const Error& e) {
                    // A tampered reveal already marked its entry forfeited;
                    // the round can still settle around it.
                    if (e.code() != errc::digest_mismatch) throw;
                }
                break;
            case Op::Settle:
                if (i + 1 != actions.size())
                    fail(errc::wrong_phase, "journal continues past settlement");
                return auction.settle();
        }
    }
    fail(errc::wrong_phase, "journal ended before settlement");
}

} // namespace qnar
