#include "covar/backtest.hpp"

#include "covar/errors.hpp"
#include "covar/special_functions.hpp"

#include <cmath>
#include <numeric>

namespace covar {

namespace {

constexpr int kMinComparisonDays = 30;

// n [q log q + (1-q) log(1-q)] with 0 log 0 = 0.
double binomial_loglik(int k, int n, double q) {
    double ll = 0.0;
    if (k > 0) ll += k * std::log(q);
    if (n - k > 0) ll += (n - k) * std::log1p(-q);
    return ll;
}

}  // namespace

double quantile_score(double r, double x, double p2) {
    const double hit = x > r ? 1.0 : 0.0;
    return (p2 - hit) * r + hit * x;
}

CoverageResult uc_test(int k, int n, double p) {
    if (n < 1 || k < 0 || k > n) throw DomainError("uc_test: need 0 <= exceedances <= n, n >= 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("uc_test: level must lie in (0,1)");
    CoverageResult r;
    r.observed = k;
    r.trials = n;
    r.expected = n * p;
    const double q = static_cast<double>(k) / n;
    r.statistic = std::max(0.0, -2.0 * (binomial_loglik(k, n, p) - binomial_loglik(k, n, q)));
    r.p_value = special::chi2_1_sf(r.statistic);
    return r;
}

CoverageResult uc_test_var(int exceed_count, int n, double p1) { return uc_test(exceed_count, n, p1); }

CoverageResult uc_test_covar(int joint_exceed, int var_exceed, double p2) {
    if (var_exceed == 0) throw DomainError("uc_test_covar: no VaR violations to condition on");
    if (joint_exceed > var_exceed)
        throw DomainError("uc_test_covar: joint exceedances exceed VaR violations");
    return uc_test(joint_exceed, var_exceed, p2);
}

double ScoreSeries::mean() const {
    if (scores.empty()) return 0.0;
    return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

std::string_view to_string(Comparison c) {
    switch (c) {
        case Comparison::Worse: return "worse";
        case Comparison::Better: return "better";
        case Comparison::Inconclusive: return "inconclusive";
    }
    return "?";
}

double newey_west_variance(std::span<const double> d, int lag) {
    const auto n = d.size();
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    auto autocov = [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t t = j; t < n; ++t) s += (d[t] - mean) * (d[t - j] - mean);
        return s / static_cast<double>(n);
    };
    double v = autocov(0);
    for (int j = 1; j <= lag && static_cast<std::size_t>(j) < n; ++j)
        v += 2.0 * (1.0 - j / (lag + 1.0)) * autocov(static_cast<std::size_t>(j));
    return std::max(v, 0.0);
}

ComparisonResult comparative_backtest(const ScoreSeries& reference, const ScoreSeries& competitor,
                                      double level) {
    if (reference.scores.size() != competitor.scores.size())
        throw DomainError("comparative_backtest: score series are not aligned");
    if (!(level > 0.0 && level < 0.5)) throw DomainError("comparative_backtest: level must lie in (0, 0.5)");
    ComparisonResult out;
    const auto n = reference.scores.size();
    out.days = static_cast<int>(n);
    if (n < static_cast<std::size_t>(kMinComparisonDays)) {
        out.warning = "fewer than 30 aligned days";
        return out;
    }
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) d[t] = reference.scores[t] - competitor.scores[t];
    out.mean_difference = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    const int lag = static_cast<int>(std::floor(std::cbrt(static_cast<double>(n))));
    const double var = newey_west_variance(d, lag);
    const double se = std::sqrt(var / static_cast<double>(n));
    if (!(se > 1e-14 * std::max(1.0, std::abs(out.mean_difference)))) {
        out.warning = "zero variance of score differences";
        out.statistic = 0.0;
        if (out.mean_difference > 0.0) out.decision = Comparison::Worse;
        else if (out.mean_difference < 0.0) out.decision = Comparison::Better;
        return out;
    }
    out.statistic = out.mean_difference / se;
    const double critical = special::normal_quantile(1.0 - level);
    if (out.statistic > critical) out.decision = Comparison::Worse;
    else if (out.statistic < -critical) out.decision = Comparison::Better;
    return out;
}

ScorePair pool_normalized_scores(std::span<const ScorePair> institutions) {
    if (institutions.empty()) throw DomainError("pool_normalized_scores: no institutions");
    ScorePair pooled;
    pooled.reference.method = institutions.front().reference.method;
    pooled.competitor.method = institutions.front().competitor.method;
    for (const auto& inst : institutions) {
        if (inst.reference.scores.size() != inst.competitor.scores.size())
            throw DomainError("pool_normalized_scores: score series are not aligned");
        const double scale = inst.reference.mean();
        if (!(std::abs(scale) > 0.0) || !std::isfinite(scale))
            throw DomainError("pool_normalized_scores: reference score scale is zero");
        for (double s : inst.reference.scores) pooled.reference.scores.push_back(s / scale);
        for (double s : inst.competitor.scores) pooled.competitor.scores.push_back(s / scale);
    }
    return pooled;
}

}  // namespace covar
