#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qnar/graph.hpp"
#include "qnar/pagerank.hpp"

namespace qnar {

struct CredRankOptions {
    // Decay applied to older epochs when folding per-epoch node scores into a
    // user's raw score: epoch t contributes c^(k-t) at period k.
    double decay = 1.0;
    // Score mass handed out at every period on top of the cumulative mint.
    double base_mint = 1000.0;
    PageRankOptions pagerank;
};

struct EpochScores {
    std::int32_t period = 0;
    // Cumulative mint over the period's graph plus the base amount; the
    // normalized scores below sum to exactly this.
    double minted = 0.0;
    std::vector<std::string> users;
    // Raw decayed epoch-node mass per user, before budget normalization.
    std::vector<double> s_star;
    // s_star rescaled so the period's scores sum to the minted budget.
    std::vector<double> scores;
    int pagerank_iterations = 0;
};

struct CredRankResult {
    std::vector<EpochScores> epochs;
};

// Cumulative mint weight over every node currently in the graph.
double mint_sum(const ContributionGraph& g, const WeightConfig& weights);

// Scores each period of the sequence: runs the two-pass ranking on the
// period's cumulative graph, folds each user's epoch-node scores with decay,
// and normalizes so the period's scores sum to mint_sum + base_mint. Throws
// NoContributors when a period has no epoch nodes yet and ZeroTotalScore when
// the folded scores vanish.
CredRankResult credrank(const EpochGraphSequence& seq, const WeightConfig& weights,
                        const CredRankOptions& options = {});

} // namespace qnar
