#include "qnar/graph.hpp"

#include <algorithm>
#include <cstring>

namespace qnar {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::User: return "user";
        case NodeKind::Courselet: return "courselet";
        case NodeKind::Order: return "order";
        case NodeKind::Review: return "review";
        case NodeKind::View: return "view";
        case NodeKind::EpochContributor: return "epoch";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_string(const std::string& name) {
    if (name == "user") return NodeKind::User;
    if (name == "courselet") return NodeKind::Courselet;
    if (name == "order") return NodeKind::Order;
    if (name == "review") return NodeKind::Review;
    if (name == "view") return NodeKind::View;
    if (name == "epoch") return NodeKind::EpochContributor;
    return std::nullopt;
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::CreateCourselet: return "courselet";
        case EventKind::Order: return "order";
        case EventKind::Review: return "review";
        case EventKind::View: return "view";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(const std::string& name) {
    if (name == "courselet") return EventKind::CreateCourselet;
    if (name == "order") return EventKind::Order;
    if (name == "review") return EventKind::Review;
    if (name == "view") return EventKind::View;
    return std::nullopt;
}

std::string NodeId::label() const {
    std::string out = to_string(kind);
    out += ':';
    out += id;
    if (kind == NodeKind::EpochContributor) {
        out += '@';
        out += std::to_string(epoch);
    }
    return out;
}

std::size_t NodeIdHash::operator()(const NodeId& n) const noexcept {
    std::size_t h = std::hash<std::string>{}(n.id);
    h ^= (static_cast<std::size_t>(n.kind) + 0x9E3779B9u) + (h << 6) + (h >> 2);
    h ^= (static_cast<std::size_t>(n.epoch) + 0x85EBCA6Bu) + (h << 6) + (h >> 2);
    return h;
}

WeightConfig WeightConfig::defaults() {
    WeightConfig w;
    w.set_edge_weight(NodeKind::View, NodeKind::Courselet, 1e-5);
    w.set_edge_weight(NodeKind::Courselet, NodeKind::User, 1.0);
    w.set_edge_weight(NodeKind::User, NodeKind::Courselet, 1.0 / 8);
    w.set_edge_weight(NodeKind::Order, NodeKind::Courselet, 5.0);
    w.set_edge_weight(NodeKind::Courselet, NodeKind::Order, 1.0 / 16);
    w.set_edge_weight(NodeKind::User, NodeKind::Order, 1.0 / 8);
    w.set_edge_weight(NodeKind::Order, NodeKind::User, 1.0);
    w.set_edge_weight(NodeKind::User, NodeKind::Review, 1.0 / 8);
    w.set_edge_weight(NodeKind::Review, NodeKind::User, 1.0);
    w.set_edge_weight(NodeKind::Review, NodeKind::Courselet, 2.0);
    w.set_edge_weight(NodeKind::Courselet, NodeKind::Review, 1.0 / 16);
    // Epoch plumbing: full credit forwarding from epoch node to identity,
    // and unit webbing weights for the optional epoch-to-epoch links.
    w.set_edge_weight(NodeKind::EpochContributor, NodeKind::User, 1.0);
    w.set_edge_weight(NodeKind::EpochContributor, NodeKind::EpochContributor, 1.0);

    w.set_mint_weight(NodeKind::Courselet, 10.0);
    w.set_mint_weight(NodeKind::Review, 1.0);
    w.set_mint_weight(NodeKind::Order, 1.0);
    w.set_mint_weight(NodeKind::View, 0.0);
    w.set_mint_weight(NodeKind::User, 0.0);
    w.set_mint_weight(NodeKind::EpochContributor, 0.0);
    return w;
}

void WeightConfig::set_edge_weight(NodeKind src, NodeKind dst, double weight) {
    if (weight < 0) fail(errc::parse_error, "edge weight must be non-negative");
    edges_[pack(src, dst)] = weight;
}

void WeightConfig::set_mint_weight(NodeKind kind, double weight) {
    if (weight < 0) fail(errc::parse_error, "mint weight must be non-negative");
    mints_[static_cast<std::uint8_t>(kind)] = weight;
}

bool WeightConfig::has_edge_weight(NodeKind src, NodeKind dst) const {
    return edges_.contains(pack(src, dst));
}

double WeightConfig::edge_weight(NodeKind src, NodeKind dst) const {
    auto it = edges_.find(pack(src, dst));
    if (it == edges_.end())
        fail(errc::unknown_edge_kind,
             std::string("no weight for edge (") + to_string(src) + ", " + to_string(dst) + ")");
    return it->second;
}

double WeightConfig::author_edge_weight(NodeKind contribution_kind) const {
    if (has_edge_weight(contribution_kind, NodeKind::EpochContributor))
        return edge_weight(contribution_kind, NodeKind::EpochContributor);
    return edge_weight(contribution_kind, NodeKind::User);
}

double WeightConfig::mint_weight(NodeKind kind) const {
    auto it = mints_.find(static_cast<std::uint8_t>(kind));
    return it == mints_.end() ? 0.0 : it->second;
}

std::map<std::string, double> WeightConfig::flat_entries() const {
    std::map<std::string, double> out;
    for (const auto& [key, weight] : edges_) {
        auto src = static_cast<NodeKind>(key >> 8);
        auto dst = static_cast<NodeKind>(key & 0xFF);
        out[std::string("edge.") + to_string(src) + "." + to_string(dst)] = weight;
    }
    for (const auto& [kind, weight] : mints_)
        out[std::string("mint.") + to_string(static_cast<NodeKind>(kind))] = weight;
    return out;
}

std::uint32_t ContributionGraph::add_node(const NodeId& id) {
    if (index_.contains(id)) fail(errc::duplicate_node, "node already exists: " + id.label());
    auto idx = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(id);
    index_.emplace(id, idx);
    return idx;
}

std::uint32_t ContributionGraph::ensure_node(const NodeId& id) {
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    return add_node(id);
}

void ContributionGraph::accumulate_edge(std::uint32_t src, std::uint32_t dst, double weight) {
    std::uint64_t key = (static_cast<std::uint64_t>(src) << 32) | dst;
    auto it = edge_slot_.find(key);
    if (it != edge_slot_.end()) {
        edges_[it->second].weight += weight;
        return;
    }
    edge_slot_.emplace(key, static_cast<std::uint32_t>(edges_.size()));
    edges_.push_back(Edge{src, dst, weight});
}

std::optional<std::uint32_t> ContributionGraph::find(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t ContributionGraph::index_of(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) fail(errc::unknown_node, "unknown node: " + id.label());
    return it->second;
}

std::vector<double> ContributionGraph::out_weight_sums() const {
    std::vector<double> sums(nodes_.size(), 0.0);
    for (const Edge& e : edges_) sums[e.src] += e.weight;
    return sums;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct ByteReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void need(std::size_t n) {
        if (pos + n > bytes.size()) fail(errc::parse_error, "truncated graph bytes");
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
    std::string str() {
        std::uint32_t len = u32();
        need(len);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), len);
        pos += len;
        return s;
    }
};

} // namespace

std::vector<std::uint8_t> ContributionGraph::serialize() const {
    std::vector<std::uint8_t> out;
    put_u32(out, static_cast<std::uint32_t>(nodes_.size()));
    for (const NodeId& n : nodes_) {
        out.push_back(static_cast<std::uint8_t>(n.kind));
        put_u32(out, static_cast<std::uint32_t>(n.epoch));
        put_u32(out, static_cast<std::uint32_t>(n.id.size()));
        out.insert(out.end(), n.id.begin(), n.id.end());
    }
    put_u32(out, static_cast<std::uint32_t>(edges_.size()));
    for (const Edge& e : edges_) {
        put_u32(out, e.src);
        put_u32(out, e.dst);
        std::uint64_t bits;
        std::memcpy(&bits, &e.weight, sizeof bits);
        put_u64(out, bits);
    }
    put_u64(out, static_cast<std::uint64_t>(horizon_));
    return out;
}

ContributionGraph ContributionGraph::deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r{bytes};
    ContributionGraph g;
    std::uint32_t node_count = r.u32();
    for (std::uint32_t i = 0; i < node_count; ++i) {
        NodeId n;
        n.kind = static_cast<NodeKind>(r.u8());
        n.epoch = static_cast<std::int32_t>(r.u32());
        n.id = r.str();
        g.add_node(n);
    }
    std::uint32_t edge_count = r.u32();
    for (std::uint32_t i = 0; i < edge_count; ++i) {
        std::uint32_t src = r.u32();
        std::uint32_t dst = r.u32();
        std::uint64_t bits = r.u64();
        double weight;
        std::memcpy(&weight, &bits, sizeof weight);
        if (src >= node_count || dst >= node_count)
            fail(errc::parse_error, "edge endpoint out of range");
        g.accumulate_edge(src, dst, weight);
    }
    g.horizon_ = static_cast<std::int64_t>(r.u64());
    if (r.pos != bytes.size()) fail(errc::parse_error, "trailing bytes after graph");
    return g;
}

namespace {

struct EventCounters {
    std::int64_t orders = 0;
    std::int64_t reviews = 0;
    std::int64_t views = 0;
};

struct Materialized {
    NodeId contribution;
    std::optional<NodeId> author;
};

// Applies one event to the graph: contribution node plus the weighted edge
// fan from the weight table. View events connect only view -> courselet, so
// they carry no author.
Materialized apply_event(ContributionGraph& g, const ContributionEvent& ev,
                         const WeightConfig& weights, EventCounters& counters) {
    if (ev.actor.empty() || ev.target.empty())
        fail(errc::parse_error, "event with empty actor or target");
    g.extend_horizon(ev.ts);

    auto link = [&](const NodeId& a, std::uint32_t ia, const NodeId& b, std::uint32_t ib) {
        g.accumulate_edge(ia, ib, weights.edge_weight(a.kind, b.kind));
        g.accumulate_edge(ib, ia, weights.edge_weight(b.kind, a.kind));
    };

    switch (ev.kind) {
        case EventKind::CreateCourselet: {
            NodeId user = NodeId::user(ev.actor);
            NodeId cl = NodeId::courselet(ev.target);
            auto iu = g.ensure_node(user);
            auto ic = g.add_node(cl);
            link(user, iu, cl, ic);
            return {cl, user};
        }
        case EventKind::Order:
        case EventKind::Review: {
            NodeId cl = NodeId::courselet(ev.target);
            auto found = g.find(cl);
            if (!found)
                fail(errc::dangling_target, "event targets unknown courselet: " + ev.target);
            bool is_order = ev.kind == EventKind::Order;
            std::int64_t seq = is_order ? ++counters.orders : ++counters.reviews;
            NodeId contrib{is_order ? NodeKind::Order : NodeKind::Review, std::to_string(seq), 0};
            NodeId user = NodeId::user(ev.actor);
            auto iu = g.ensure_node(user);
            auto in = g.add_node(contrib);
            link(user, iu, contrib, in);
            link(contrib, in, cl, *found);
            return {contrib, user};
        }
        case EventKind::View: {
            NodeId cl = NodeId::courselet(ev.target);
            auto found = g.find(cl);
            if (!found)
                fail(errc::dangling_target, "event targets unknown courselet: " + ev.target);
            NodeId contrib{NodeKind::View, std::to_string(++counters.views), 0};
            auto in = g.add_node(contrib);
            g.accumulate_edge(in, *found, weights.edge_weight(NodeKind::View, NodeKind::Courselet));
            return {contrib, std::nullopt};
        }
    }
    fail(errc::parse_error, "unreachable event kind");
}

void sort_events(std::vector<ContributionEvent>& events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const ContributionEvent& a, const ContributionEvent& b) { return a.ts < b.ts; });
}

} // namespace

ContributionGraph ingest_events(std::vector<ContributionEvent> events, const WeightConfig& weights) {
    sort_events(events);
    ContributionGraph g;
    EventCounters counters;
    for (const ContributionEvent& ev : events) apply_event(g, ev, weights, counters);
    return g;
}

EpochGraphSequence build_epoch_sequence(std::vector<ContributionEvent> events,
                                        const EpochConfig& epochs, const WeightConfig& weights,
                                        const EpochBuildOptions& options) {
    if (epochs.period_seconds <= 0) fail(errc::parse_error, "epoch period must be positive");
    if (epochs.count < 1) fail(errc::parse_error, "epoch count must be at least 1");
    sort_events(events);

    auto period_of = [&](std::int64_t ts) -> std::int32_t {
        if (ts < epochs.origin)
            fail(errc::event_outside_horizon,
                 "event at ts " + std::to_string(ts) + " precedes epoch origin");
        std::int64_t k = (ts - epochs.origin) / epochs.period_seconds + 1;
        if (k > epochs.count)
            fail(errc::event_outside_horizon,
                 "event at ts " + std::to_string(ts) + " falls after period " +
                     std::to_string(epochs.count));
        return static_cast<std::int32_t>(k);
    };
    for (const ContributionEvent& ev : events) period_of(ev.ts);

    EpochGraphSequence seq;
    seq.config = epochs;
    ContributionGraph g;
    EventCounters counters;
    std::vector<NodeId> contributions;
    std::vector<NodeId> epoch_nodes;
    std::unordered_map<std::string, std::int32_t> last_epoch_of_user;

    std::size_t next_event = 0;
    for (std::int32_t k = 1; k <= epochs.count; ++k) {
        while (next_event < events.size() && period_of(events[next_event].ts) == k) {
            const ContributionEvent& ev = events[next_event++];
            Materialized m = apply_event(g, ev, weights, counters);
            contributions.push_back(m.contribution);
            if (!m.author) continue;

            NodeId epoch_node = NodeId::epoch_contributor(m.author->id, k);
            auto existing = g.find(epoch_node);
            std::uint32_t ie;
            if (existing) {
                ie = *existing;
            } else {
                ie = g.add_node(epoch_node);
                epoch_nodes.push_back(epoch_node);
                auto iu = g.index_of(*m.author);
                g.accumulate_edge(ie, iu,
                                  weights.edge_weight(NodeKind::EpochContributor, NodeKind::User));
                auto prev = last_epoch_of_user.find(m.author->id);
                if (options.webbing && prev != last_epoch_of_user.end()) {
                    double ww = weights.edge_weight(NodeKind::EpochContributor,
                                                    NodeKind::EpochContributor);
                    auto ip = g.index_of(NodeId::epoch_contributor(m.author->id, prev->second));
                    g.accumulate_edge(ip, ie, ww);
                    g.accumulate_edge(ie, ip, ww);
                }
                last_epoch_of_user[m.author->id] = k;
            }
            auto ic = g.index_of(m.contribution);
            g.accumulate_edge(ic, ie, weights.author_edge_weight(m.contribution.kind));
        }
        seq.graphs.push_back(g);
        seq.contributions.push_back(contributions);
        seq.epoch_nodes.push_back(epoch_nodes);
    }
    return seq;
}

} // namespace qnar
