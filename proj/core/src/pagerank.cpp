#include "qnar/pagerank.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "qnar/errors.hpp"

namespace qnar {

namespace {

bool is_anchor(const NodeId& n) {
    return n.kind == NodeKind::User || n.kind == NodeKind::Courselet;
}

void check_seed(const ContributionGraph& g, std::span<const double> seed) {
    if (seed.size() != g.node_count())
        fail(errc::parse_error, "seed length does not match node count");
    double sum = std::accumulate(seed.begin(), seed.end(), 0.0);
    if (!(std::abs(sum - 1.0) < 1e-9)) fail(errc::parse_error, "seed must sum to 1");
}

} // namespace

std::vector<double> uniform_seed(const ContributionGraph& g) {
    if (g.node_count() == 0) fail(errc::empty_anchor_set, "graph has no nodes");
    return std::vector<double>(g.node_count(), 1.0 / static_cast<double>(g.node_count()));
}

std::vector<double> anchor_seed(const ContributionGraph& g, std::span<const double> mass) {
    if (mass.size() != g.node_count())
        fail(errc::parse_error, "mass length does not match node count");
    std::vector<double> seed(g.node_count(), 0.0);
    double total = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!is_anchor(g.node(static_cast<std::uint32_t>(i)))) continue;
        any = true;
        seed[i] = mass[i];
        total += mass[i];
    }
    if (!any) fail(errc::empty_anchor_set, "graph has no user or courselet nodes");
    if (total <= 0.0) fail(errc::zero_anchor_mass, "anchor nodes carry no mass");
    for (double& v : seed) v /= total;
    return seed;
}

PageRankResult pagerank(const ContributionGraph& g, std::span<const double> seed,
                        const PageRankOptions& options) {
    check_seed(g, seed);
    if (!(options.alpha > 0.0 && options.alpha < 1.0))
        fail(errc::parse_error, "alpha must lie in (0, 1)");

    const std::size_t n = g.node_count();
    std::vector<double> out = g.out_weight_sums();
    std::vector<double> pr(seed.begin(), seed.end());
    std::vector<double> next(n, 0.0);

    const double damp = 1.0 - options.alpha;
    double diff = 0.0;
    for (int iter = 1; iter <= options.max_iter; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = 0.0;
            if (out[i] <= 0.0) dangling += pr[i];
        }
        for (const Edge& e : g.edges()) next[e.dst] += pr[e.src] * (e.weight / out[e.src]);
        for (std::size_t i = 0; i < n; ++i)
            next[i] = options.alpha * seed[i] + damp * (next[i] + dangling * seed[i]);

        diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += std::abs(next[i] - pr[i]);
        pr.swap(next);
        if (diff < options.tol) return {std::move(pr), iter, diff};
    }
    throw ConvergenceError(diff, options.tol, options.max_iter,
                           "power iteration still at " + std::to_string(diff) + " after " +
                               std::to_string(options.max_iter) + " iterations");
}

PageRankResult two_pass_pagerank(const ContributionGraph& g, const PageRankOptions& options) {
    PageRankResult base = pagerank(g, uniform_seed(g), options);
    std::vector<double> seed = anchor_seed(g, base.scores);
    return pagerank(g, seed, options);
}

std::vector<double> pagerank_direct(const ContributionGraph& g, std::span<const double> seed,
                                    double alpha) {
    check_seed(g, seed);
    const std::size_t n = g.node_count();
    if (n > 2000) fail(errc::too_large, "direct solve capped at 2000 nodes");

    std::vector<double> out = g.out_weight_sums();
    // Transition matrix with dangling rows replaced by the seed row, then the
    // fixed point pr = alpha*s + (1-alpha)*pr*P becomes the linear system
    // (I - (1-alpha)*P)^T x = alpha*s.
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (const Edge& e : g.edges()) P(e.src, e.dst) += e.weight / out[e.src];
    for (std::size_t i = 0; i < n; ++i) {
        if (out[i] > 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) P(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)) = seed[j];
    }

    Eigen::MatrixXd A =
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) -
        (1.0 - alpha) * P.transpose();
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) = alpha * seed[i];
    Eigen::VectorXd x = A.partialPivLu().solve(b);

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = x(static_cast<Eigen::Index>(i));
    return scores;
}

} // namespace qnar
