#include "qnar/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qnar/errors.hpp"

namespace qnar {

void Welford::add(double x) {
    ++count_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void Welford::merge(const Welford& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    auto n1 = static_cast<double>(count_);
    auto n2 = static_cast<double>(other.count_);
    double delta = other.mean_ - mean_;
    double total = n1 + n2;
    mean_ += delta * n2 / total;
    m2_ += other.m2_ + delta * delta * n1 * n2 / total;
    count_ += other.count_;
}

double Welford::mean() const {
    if (count_ == 0) fail(errc::degenerate_returns, "no samples");
    return mean_;
}

double Welford::variance() const {
    if (count_ < 2) fail(errc::degenerate_returns, "variance needs at least two samples");
    return m2_ / static_cast<double>(count_ - 1);
}

double Welford::stddev() const { return std::sqrt(variance()); }

double sharpe_ratio(const Welford& samples) {
    double sd = samples.stddev();
    if (sd == 0.0) fail(errc::degenerate_returns, "returns have zero spread");
    return samples.mean() / sd;
}

double positive_predictive_value(double alpha, double beta, double good_bad_ratio) {
    double denom = beta * good_bad_ratio + alpha;
    if (denom == 0.0) fail(errc::division_by_zero, "no accepted submissions to score");
    return (1.0 - beta) * good_bad_ratio / denom;
}

double median(std::vector<double> values) {
    if (values.empty()) fail(errc::degenerate_returns, "median of empty sample");
    std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                     values.begin() + static_cast<std::ptrdiff_t>(mid));
    return (values[mid - 1] + hi) / 2.0;
}

} // namespace qnar
