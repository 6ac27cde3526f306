#include "covar/empirical_tdf.hpp"

#include "covar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace covar {

LossPairSample::LossPairSample(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size())
        throw DomainError("loss pair sample: sequences differ in length");
    if (xs_.size() < 2) throw DomainError("loss pair sample: need at least 2 observations");
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
            throw DomainError("loss pair sample: non-finite value at index " + std::to_string(i));
    }
}

std::vector<int> ordinal_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<int> ranks(values.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
    return ranks;
}

RankVectors compute_ranks(const LossPairSample& sample) {
    return {ordinal_ranks(sample.xs()), ordinal_ranks(sample.ys())};
}

double r_hat(const RankVectors& ranks, int m, double x, double y) {
    const auto n = static_cast<int>(ranks.rx.size());
    if (m < 1 || m > n) throw DomainError("r_hat: m must lie in [1, n]");
    if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("r_hat: x and y must be nonnegative");
    const double threshold_x = n + 0.5 - m * x;
    const double threshold_y = n + 0.5 - m * y;
    int count = 0;
    for (int i = 0; i < n; ++i) {
        if (ranks.rx[i] >= threshold_x && ranks.ry[i] >= threshold_y) ++count;
    }
    return static_cast<double>(count) / m;
}

double r_hat(const LossPairSample& sample, int m, double x, double y) {
    return r_hat(compute_ranks(sample), m, x, y);
}

double tdc_hat(const LossPairSample& sample, int m) { return r_hat(sample, m, 1.0, 1.0); }

}  // namespace covar
