#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qnar/credrank.hpp"
#include "qnar/graph.hpp"
#include "qnar/ledger.hpp"

namespace qnar {

// Everything the scoring pipeline accumulates, packaged for persistence.
struct Snapshot {
    ContributionGraph graph;
    EpochGraphSequence epochs;
    CredRankResult scores;
    Ledger ledger;
};

// Container layout: the magic "QSNP", a little-endian u32 header length, a
// JSON header carrying the format version, the section name/size table, and
// a SHA-256 over the body, then the section payloads back to back in table
// order. Decoding verifies the checksum before touching any payload.
std::vector<std::uint8_t> encode_snapshot(const Snapshot& snapshot);
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);
Snapshot read_snapshot(const std::filesystem::path& path);

} // namespace qnar
