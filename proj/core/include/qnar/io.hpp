#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qnar/auction.hpp"
#include "qnar/credrank.hpp"
#include "qnar/graph.hpp"
#include "qnar/ledger.hpp"
#include "qnar/simulation.hpp"

namespace qnar {

// Event stream: one JSON object per line with kind, actor, target, and ts.
std::vector<ContributionEvent> parse_events_jsonl(std::istream& in);
std::vector<ContributionEvent> read_events_jsonl(const std::filesystem::path& path);

// Auction journal: one JSON object per line with op (propose, commit, close,
// reveal, settle) plus the fields that op needs. Token amounts are decimal
// strings so they survive the trip exactly; digests and nonces are hex.
std::vector<AuctionAction> parse_auction_journal(std::istream& in);
std::vector<AuctionAction> read_auction_journal(const std::filesystem::path& path);

// Writes through a temporary file in the same directory and renames it into
// place, so readers never observe a half-written file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// Doubles in CSV output carry 12 significant digits with a dot decimal
// separator regardless of locale.
std::string format_csv_double(double value);

std::string scores_csv(const CredRankResult& result);
// One row per replication of every grid cell, in grid order: n, rounds,
// dist, exp_return, std, sharpe, survivors. Degenerate statistics leave
// their field empty, and std/sharpe need at least two return samples.
std::string simulation_csv(std::span<const SimulationResult> results);
// One row per staker-round of every replication that recorded wealth paths;
// wealth is in exact subunits.
std::string wealth_paths_csv(std::span<const SimulationResult> results);
std::string payouts_csv(const PayoutRun& run);
std::string settlement_csv(const Settlement& settlement);

} // namespace qnar
