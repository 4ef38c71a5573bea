#include "qnar/snapshot.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "qnar/auction.hpp"
#include "qnar/errors.hpp"
#include "qnar/io.hpp"

namespace qnar {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'Q', 'S', 'N', 'P'};
constexpr int kVersion = 1;

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

void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

void put_node(std::vector<std::uint8_t>& out, const NodeId& n) {
    out.push_back(static_cast<std::uint8_t>(n.kind));
    put_u32(out, static_cast<std::uint32_t>(n.epoch));
    put_str(out, n.id);
}

struct ByteReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void need(std::size_t n) {
        if (pos + n > bytes.size()) fail(errc::parse_error, "truncated snapshot section");
    }
    std::uint8_t u8() {
        need(1);
        return bytes[pos++];
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
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        std::uint32_t len = u32();
        need(len);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), len);
        pos += len;
        return s;
    }
    std::span<const std::uint8_t> blob(std::size_t len) {
        need(len);
        auto out = bytes.subspan(pos, len);
        pos += len;
        return out;
    }
    NodeId node() {
        NodeId n;
        n.kind = static_cast<NodeKind>(u8());
        n.epoch = static_cast<std::int32_t>(u32());
        n.id = str();
        return n;
    }
};

std::vector<std::uint8_t> encode_epochs(const EpochGraphSequence& epochs) {
    std::vector<std::uint8_t> out;
    put_u64(out, static_cast<std::uint64_t>(epochs.config.origin));
    put_u64(out, static_cast<std::uint64_t>(epochs.config.period_seconds));
    put_u32(out, static_cast<std::uint32_t>(epochs.config.count));
    put_u32(out, static_cast<std::uint32_t>(epochs.graphs.size()));
    for (std::size_t k = 0; k < epochs.graphs.size(); ++k) {
        std::vector<std::uint8_t> g = epochs.graphs[k].serialize();
        put_u32(out, static_cast<std::uint32_t>(g.size()));
        out.insert(out.end(), g.begin(), g.end());
        put_u32(out, static_cast<std::uint32_t>(epochs.contributions[k].size()));
        for (const NodeId& n : epochs.contributions[k]) put_node(out, n);
        put_u32(out, static_cast<std::uint32_t>(epochs.epoch_nodes[k].size()));
        for (const NodeId& n : epochs.epoch_nodes[k]) put_node(out, n);
    }
    return out;
}

EpochGraphSequence decode_epochs(std::span<const std::uint8_t> bytes) {
    ByteReader r{bytes};
    EpochGraphSequence epochs;
    epochs.config.origin = static_cast<std::int64_t>(r.u64());
    epochs.config.period_seconds = static_cast<std::int64_t>(r.u64());
    epochs.config.count = static_cast<std::int32_t>(r.u32());
    std::uint32_t periods = r.u32();
    for (std::uint32_t k = 0; k < periods; ++k) {
        std::uint32_t glen = r.u32();
        epochs.graphs.push_back(ContributionGraph::deserialize(r.blob(glen)));
        std::uint32_t nc = r.u32();
        std::vector<NodeId> contribs(nc);
        for (std::uint32_t i = 0; i < nc; ++i) contribs[i] = r.node();
        epochs.contributions.push_back(std::move(contribs));
        std::uint32_t ne = r.u32();
        std::vector<NodeId> enodes(ne);
        for (std::uint32_t i = 0; i < ne; ++i) enodes[i] = r.node();
        epochs.epoch_nodes.push_back(std::move(enodes));
    }
    if (r.pos != bytes.size()) fail(errc::parse_error, "trailing bytes after epochs");
    return epochs;
}

std::vector<std::uint8_t> encode_scores(const CredRankResult& scores) {
    std::vector<std::uint8_t> out;
    put_u32(out, static_cast<std::uint32_t>(scores.epochs.size()));
    for (const EpochScores& es : scores.epochs) {
        put_u32(out, static_cast<std::uint32_t>(es.period));
        put_f64(out, es.minted);
        put_u32(out, static_cast<std::uint32_t>(es.pagerank_iterations));
        put_u32(out, static_cast<std::uint32_t>(es.users.size()));
        for (std::size_t i = 0; i < es.users.size(); ++i) {
            put_str(out, es.users[i]);
            put_f64(out, es.s_star[i]);
            put_f64(out, es.scores[i]);
        }
    }
    return out;
}

CredRankResult decode_scores(std::span<const std::uint8_t> bytes) {
    ByteReader r{bytes};
    CredRankResult scores;
    std::uint32_t periods = r.u32();
    for (std::uint32_t k = 0; k < periods; ++k) {
        EpochScores es;
        es.period = static_cast<std::int32_t>(r.u32());
        es.minted = r.f64();
        es.pagerank_iterations = static_cast<int>(r.u32());
        std::uint32_t n = r.u32();
        for (std::uint32_t i = 0; i < n; ++i) {
            es.users.push_back(r.str());
            es.s_star.push_back(r.f64());
            es.scores.push_back(r.f64());
        }
        scores.epochs.push_back(std::move(es));
    }
    if (r.pos != bytes.size()) fail(errc::parse_error, "trailing bytes after scores");
    return scores;
}

} // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snapshot) {
    struct Section {
        const char* name;
        std::vector<std::uint8_t> payload;
    };
    Section sections[] = {
        {"graph", snapshot.graph.serialize()},
        {"epochs", encode_epochs(snapshot.epochs)},
        {"scores", encode_scores(snapshot.scores)},
        {"ledger", snapshot.ledger.serialize()},
    };

    std::vector<std::uint8_t> body;
    json table = json::array();
    for (const Section& s : sections) {
        table.push_back({{"name", s.name}, {"size", s.payload.size()}});
        body.insert(body.end(), s.payload.begin(), s.payload.end());
    }
    json header = {
        {"version", kVersion},
        {"sections", table},
        {"sha256", to_hex(sha256(body))},
    };
    std::string header_text = header.dump();

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, static_cast<std::uint32_t>(header_text.size()));
    out.insert(out.end(), header_text.begin(), header_text.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        fail(errc::parse_error, "not a snapshot: bad magic");
    ByteReader r{bytes, 4};
    std::uint32_t header_len = r.u32();
    std::string header_text(reinterpret_cast<const char*>(r.blob(header_len).data()), header_len);
    json header = json::parse(header_text, nullptr, false);
    if (header.is_discarded() || !header.is_object())
        fail(errc::parse_error, "snapshot header is not valid JSON");
    if (header.value("version", -1) != kVersion)
        fail(errc::parse_error, "unsupported snapshot version");

    std::span<const std::uint8_t> body = bytes.subspan(r.pos);
    if (to_hex(sha256(body)) != header.value("sha256", std::string{}))
        fail(errc::checksum_mismatch, "snapshot body does not match its checksum");

    Snapshot snapshot;
    bool have_graph = false, have_epochs = false, have_scores = false, have_ledger = false;
    std::size_t offset = 0;
    for (const json& entry : header.at("sections")) {
        std::string name = entry.at("name").get<std::string>();
        auto size = entry.at("size").get<std::size_t>();
        if (offset + size > body.size()) fail(errc::parse_error, "section table overruns body");
        std::span<const std::uint8_t> payload = body.subspan(offset, size);
        offset += size;
        if (name == "graph") {
            snapshot.graph = ContributionGraph::deserialize(payload);
            have_graph = true;
        } else if (name == "epochs") {
            snapshot.epochs = decode_epochs(payload);
            have_epochs = true;
        } else if (name == "scores") {
            snapshot.scores = decode_scores(payload);
            have_scores = true;
        } else if (name == "ledger") {
            snapshot.ledger = Ledger::deserialize(payload);
            have_ledger = true;
        }
    }
    if (offset != body.size()) fail(errc::parse_error, "section table does not cover body");
    if (!have_graph || !have_epochs || !have_scores || !have_ledger)
        fail(errc::parse_error, "snapshot is missing a required section");
    return snapshot;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
    std::vector<std::uint8_t> bytes = encode_snapshot(snapshot);
    atomic_write(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open snapshot: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_snapshot(bytes);
}

} // namespace qnar
