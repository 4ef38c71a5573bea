#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qnar/errors.hpp"

namespace qnar {

enum class NodeKind : std::uint8_t {
    User = 0,
    Courselet = 1,
    Order = 2,
    Review = 3,
    View = 4,
    EpochContributor = 5,
};

const char* to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& name);

/// Graph node identity: kind + opaque id, plus the period index for epoch
/// contributor nodes (epoch == 0 for every persistent node).
struct NodeId {
    NodeKind kind = NodeKind::User;
    std::string id;
    std::int32_t epoch = 0;

    bool operator==(const NodeId&) const = default;

    static NodeId user(std::string id) { return {NodeKind::User, std::move(id), 0}; }
    static NodeId courselet(std::string id) { return {NodeKind::Courselet, std::move(id), 0}; }
    static NodeId epoch_contributor(std::string user_id, std::int32_t period) {
        return {NodeKind::EpochContributor, std::move(user_id), period};
    }

    /// Human/CSV form: "user:alice", "epoch:alice@3".
    std::string label() const;
};

struct NodeIdHash {
    std::size_t operator()(const NodeId& n) const noexcept;
};

enum class EventKind : std::uint8_t { CreateCourselet, Order, Review, View };

const char* to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(const std::string& name);

/// One timestamped platform event. `target` is the courselet acted on (or,
/// for CreateCourselet, the id of the courselet being created). Timestamps
/// are integer seconds; ties keep input order.
struct ContributionEvent {
    EventKind kind;
    std::string actor;
    std::string target;
    std::int64_t ts = 0;
};

/// Edge and minting weight tables. Defaults reproduce the shipped community
/// tables; both maps stay open for extension through config files.
class WeightConfig {
public:
    static WeightConfig defaults();

    void set_edge_weight(NodeKind src, NodeKind dst, double weight);
    void set_mint_weight(NodeKind kind, double weight);

    bool has_edge_weight(NodeKind src, NodeKind dst) const;

    /// Throws UnknownEdgeKind when the pair has no entry.
    double edge_weight(NodeKind src, NodeKind dst) const;

    /// Weight for the contribution -> epoch-contributor edge: an explicit
    /// (kind, EpochContributor) entry wins, otherwise the (kind, User)
    /// author edge weight is reused since the epoch node stands in for the
    /// author at that period.
    double author_edge_weight(NodeKind contribution_kind) const;

    double mint_weight(NodeKind kind) const;

    /// Deterministic (sorted-key) view for serialization.
    std::map<std::string, double> flat_entries() const;

private:
    static std::uint16_t pack(NodeKind src, NodeKind dst) {
        return static_cast<std::uint16_t>((static_cast<std::uint16_t>(src) << 8) |
                                          static_cast<std::uint16_t>(dst));
    }

    std::unordered_map<std::uint16_t, double> edges_;
    std::unordered_map<std::uint8_t, double> mints_;
};

struct Edge {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    double weight = 0.0;
};

/// Directed weighted multigraph with parallel edges collapsed by weight
/// accumulation. Node and edge order is insertion order, which makes the
/// serialized form deterministic. Construction is single-writer; a finished
/// graph is immutable and safe for concurrent reads.
class ContributionGraph {
public:
    std::uint32_t add_node(const NodeId& id);     // throws DuplicateNode
    std::uint32_t ensure_node(const NodeId& id);  // add if absent
    void accumulate_edge(std::uint32_t src, std::uint32_t dst, double weight);

    std::optional<std::uint32_t> find(const NodeId& id) const;
    std::uint32_t index_of(const NodeId& id) const;  // throws UnknownNode

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const NodeId& node(std::uint32_t index) const { return nodes_[index]; }
    std::span<const NodeId> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }

    std::int64_t horizon() const { return horizon_; }
    void extend_horizon(std::int64_t ts) { horizon_ = std::max(horizon_, ts); }

    /// Sum of outgoing edge weights per node (the random-walk degree d_i).
    std::vector<double> out_weight_sums() const;

    /// Canonical byte serialization (nodes then edges, insertion order).
    std::vector<std::uint8_t> serialize() const;
    static ContributionGraph deserialize(std::span<const std::uint8_t> bytes);

private:
    std::vector<NodeId> nodes_;
    std::unordered_map<NodeId, std::uint32_t, NodeIdHash> index_;
    std::vector<Edge> edges_;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_slot_;
    std::int64_t horizon_ = 0;
};

/// Builds the raw event graph: one contribution node per event plus the
/// weighted edge fan defined by the weight table. Events are stably sorted
/// by timestamp first.
ContributionGraph ingest_events(std::vector<ContributionEvent> events, const WeightConfig& weights);

struct EpochConfig {
    std::int64_t origin = 0;
    std::int64_t period_seconds = 7 * 24 * 3600;
    std::int32_t count = 1;
};

/// Epoch-discretized cumulative graphs G_1..G_T. graphs[k-1] contains all
/// events with ts < origin + k*period plus the epoch contributor nodes for
/// every period <= k; contributions[k-1] / epoch_nodes[k-1] are the
/// cumulative A_k and C_k sets in insertion order.
struct EpochGraphSequence {
    EpochConfig config;
    std::vector<ContributionGraph> graphs;
    std::vector<std::vector<NodeId>> contributions;
    std::vector<std::vector<NodeId>> epoch_nodes;

    std::int32_t periods() const { return static_cast<std::int32_t>(graphs.size()); }
};

struct EpochBuildOptions {
    /// Adds forward+backward edges between consecutive epoch nodes of the
    /// same user (weight table key (epoch, epoch)). Off by default.
    bool webbing = false;
};

EpochGraphSequence build_epoch_sequence(std::vector<ContributionEvent> events,
                                        const EpochConfig& epochs, const WeightConfig& weights,
                                        const EpochBuildOptions& options = {});

} // namespace qnar
