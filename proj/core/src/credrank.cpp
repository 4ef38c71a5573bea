#include "qnar/credrank.hpp"

#include <cmath>
#include <unordered_map>

#include "qnar/errors.hpp"

namespace qnar {

double mint_sum(const ContributionGraph& g, const WeightConfig& weights) {
    double total = 0.0;
    for (const NodeId& n : g.nodes()) total += weights.mint_weight(n.kind);
    return total;
}

CredRankResult credrank(const EpochGraphSequence& seq, const WeightConfig& weights,
                        const CredRankOptions& options) {
    if (!(options.decay >= 0.0)) fail(errc::parse_error, "decay must be non-negative");
    if (!(options.base_mint >= 0.0)) fail(errc::parse_error, "base mint must be non-negative");

    CredRankResult result;
    result.epochs.reserve(seq.graphs.size());

    for (std::size_t idx = 0; idx < seq.graphs.size(); ++idx) {
        const auto k = static_cast<std::int32_t>(idx + 1);
        const ContributionGraph& g = seq.graphs[idx];
        const std::vector<NodeId>& epoch_nodes = seq.epoch_nodes[idx];
        if (epoch_nodes.empty())
            fail(errc::no_contributors, "period " + std::to_string(k) + " has no contributors");

        PageRankResult ranked = two_pass_pagerank(g, options.pagerank);

        // Contributors keep the order in which their first epoch node was
        // created, which makes the output stable across runs.
        std::vector<std::string> users;
        std::unordered_map<std::string, double> raw;
        for (const NodeId& en : epoch_nodes) {
            auto [it, inserted] = raw.try_emplace(en.id, 0.0);
            if (inserted) users.push_back(en.id);
            it->second += std::pow(options.decay, static_cast<double>(k - en.epoch)) *
                          ranked.scores[g.index_of(en)];
        }

        double total = 0.0;
        for (const std::string& u : users) total += raw[u];
        if (!(total > 0.0))
            fail(errc::zero_total_score, "period " + std::to_string(k) + " scores sum to zero");

        EpochScores es;
        es.period = k;
        es.minted = mint_sum(g, weights) + options.base_mint;
        es.pagerank_iterations = ranked.iterations;
        es.users = std::move(users);
        es.s_star.reserve(es.users.size());
        es.scores.reserve(es.users.size());
        for (const std::string& u : es.users) {
            es.s_star.push_back(raw[u]);
            es.scores.push_back(raw[u] / total * es.minted);
        }
        result.epochs.push_back(std::move(es));
    }
    return result;
}

} // namespace qnar
