#pragma once

#include <span>
#include <vector>

namespace covar {

/// Paired losses (x_i, y_i): institution vs. system proxy.
class LossPairSample {
public:
    /// Throws DomainError unless both sequences have equal length n >= 2 and are finite.
    LossPairSample(std::vector<double> xs, std::vector<double> ys);

    std::span<const double> xs() const noexcept { return xs_; }
    std::span<const double> ys() const noexcept { return ys_; }
    std::size_t size() const noexcept { return xs_.size(); }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

/// Ascending ordinal ranks (1..n) of both coordinates.
struct RankVectors {
    std::vector<int> rx;
    std::vector<int> ry;
};

/// Ordinal ranks of one sequence; ties go to the earlier index first.
std::vector<int> ordinal_ranks(std::span<const double> values);

RankVectors compute_ranks(const LossPairSample& sample);

/// Rank-based nonparametric tail dependence estimate
///   (1/m) #{i : rx_i >= n + 1/2 - m x, ry_i >= n + 1/2 - m y}.
double r_hat(const RankVectors& ranks, int m, double x, double y);
double r_hat(const LossPairSample& sample, int m, double x, double y);

/// Tail dependence coefficient estimate r_hat(m, 1, 1).
double tdc_hat(const LossPairSample& sample, int m);

}  // namespace covar
