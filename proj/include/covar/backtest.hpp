#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covar {

/// Quantile score (p2 - 1{x > r}) r + 1{x > r} x; lower is better.
double quantile_score(double r, double x, double p2);

struct CoverageResult {
    int observed = 0;       ///< exceedance count
    int trials = 0;         ///< evaluated days
    double expected = 0.0;  ///< trials * p
    double statistic = 0.0; ///< likelihood-ratio statistic
    double p_value = 1.0;   ///< chi-square(1) tail of the statistic
};

/// Binomial likelihood-ratio test of H0: exceedance probability = p.
CoverageResult uc_test(int exceed_count, int n, double p);

/// VaR coverage: exceed_count violations in n days at level p1.
CoverageResult uc_test_var(int exceed_count, int n, double p1);

/// CoVaR coverage on the VaR-violation days: joint_exceed system exceedances
/// among var_exceed days, level p2. Throws DomainError when var_exceed = 0.
CoverageResult uc_test_covar(int joint_exceed, int var_exceed, double p2);

/// Per-day scores of one method on the evaluation days.
struct ScoreSeries {
    std::string method;
    std::vector<double> scores;
    double mean() const;
};

enum class Comparison {
    Worse,        ///< reference significantly worse than the competitor (green)
    Better,       ///< reference significantly better (red)
    Inconclusive  ///< neither one-sided test rejects (yellow)
};
std::string_view to_string(Comparison c);

struct ComparisonResult {
    Comparison decision = Comparison::Inconclusive;
    double mean_difference = 0.0;  ///< mean of reference minus competitor scores
    double statistic = 0.0;        ///< HAC-studentized mean difference
    int days = 0;
    std::string warning;
};

/// Two one-sided tests on the mean score difference d_t = S_ref,t - S_comp,t at
/// the given level, with a Newey-West (Bartlett) variance at lag floor(T^(1/3)).
/// A zero variance classifies by the sign of the mean; fewer than 30 days is
/// inconclusive with a warning.
ComparisonResult comparative_backtest(const ScoreSeries& reference, const ScoreSeries& competitor,
                                      double level = 0.10);

/// One institution's scores under a reference and a competing method.
struct ScorePair {
    ScoreSeries reference;
    ScoreSeries competitor;
};

/// Divides each institution's scores (both methods) by the mean reference score
/// of that institution, then concatenates across institutions.
ScorePair pool_normalized_scores(std::span<const ScorePair> institutions);

/// Newey-West long-run variance of a series with Bartlett weights.
double newey_west_variance(std::span<const double> d, int lag);

}  // namespace covar
