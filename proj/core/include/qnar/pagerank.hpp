#pragma once

#include <span>
#include <vector>

#include "qnar/graph.hpp"

namespace qnar {

struct PageRankOptions {
    double alpha = 0.15;
    double tol = 1e-10;
    int max_iter = 10000;
};

struct PageRankResult {
    std::vector<double> scores;
    int iterations = 0;
    double residual = 0.0;
};

// Builds the seed vector that puts equal mass on every node.
std::vector<double> uniform_seed(const ContributionGraph& g);

// Builds a seed vector proportional to `mass` but restricted to user and
// courselet nodes. Throws EmptyAnchorSet when the graph has no such nodes and
// ZeroAnchorMass when their combined mass is zero.
std::vector<double> anchor_seed(const ContributionGraph& g, std::span<const double> mass);

// Power iteration for pr = alpha * s + (1 - alpha) * pr * P, where P is the
// row-normalized weighted adjacency and rows without out-edges redistribute
// their mass to the seed. Stops when the L1 step difference drops below tol;
// throws NoConvergence (with the residual attached) past max_iter.
PageRankResult pagerank(const ContributionGraph& g, std::span<const double> seed,
                        const PageRankOptions& options = {});

// Uniform pass to weight the anchors, then a personalized pass seeded by the
// first pass's anchor mass.
PageRankResult two_pass_pagerank(const ContributionGraph& g, const PageRankOptions& options = {});

// Direct dense solve of the same fixed point via LU factorization. Intended
// as a cross-check for small graphs; throws TooLarge above 2000 nodes.
std::vector<double> pagerank_direct(const ContributionGraph& g, std::span<const double> seed,
                                    double alpha = 0.15);

} // namespace qnar
