#pragma once

#include <cstdint>
#include <vector>

namespace qnar {

// Running mean and variance in one pass, mergeable across shards so results
// do not depend on how the samples were split up.
class Welford {
public:
    void add(double x);
    void merge(const Welford& other);

    std::int64_t count() const { return count_; }
    double mean() const;
    // Sample variance (n - 1 denominator); throws DegenerateReturns below two
    // samples.
    double variance() const;
    double stddev() const;

private:
    std::int64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Mean over sample standard deviation. Throws DegenerateReturns when the
// spread is zero or there are not enough samples to estimate it.
double sharpe_ratio(const Welford& samples);

// Chance that an accepted item is actually good, given false-positive rate
// alpha, false-negative rate beta, and the good-to-bad ratio of submissions:
// (1 - beta) * ratio / (beta * ratio + alpha). The formula is a likelihood
// ratio rather than a probability, so values above 1 are possible; callers
// wanting a probability should cap it. Throws DivisionByZero when the
// denominator vanishes.
double positive_predictive_value(double alpha, double beta, double good_bad_ratio);

double median(std::vector<double> values);

} // namespace qnar
