#include "covar/backtest.hpp"
#include "covar/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace covar;

namespace {

// Kupiec likelihood ratio written out independently, with Boost's chi-square tail.
double kupiec_p_value(int x, int n, double p) {
    auto ll = [&](double q) {
        double v = 0;
        if (x > 0) v += x * std::log(q);
        if (n - x > 0) v += (n - x) * std::log1p(-q);
        return v;
    };
    const double lr = std::max(0.0, -2 * (ll(p) - ll(double(x) / n)));
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(1), lr));
}

ScoreSeries series(std::string name, std::vector<double> v) { return {std::move(name), std::move(v)}; }

}  // namespace

TEST_CASE("quantile score") {
    CHECK(quantile_score(2, 1, 0.05) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(quantile_score(2, 3, 0.05) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(quantile_score(2, 2, 0.05) == doctest::Approx(0.1).epsilon(1e-15));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 10);
    for (int i = 0; i < 1000; ++i) {
        const double r = u(rng), x = u(rng) * (r / 10);
        CHECK(quantile_score(r, x, 0.05) >= 0.0);
    }
}

TEST_CASE("quantile score is minimized at the true quantile") {
    // Exponential(1): the 0.95 quantile is log 20.
    std::mt19937_64 rng(2);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(200000);
    for (auto& v : x) v = e(rng);
    auto mean_score = [&](double r) {
        double s = 0;
        for (double v : x) s += quantile_score(r, v, 0.05);
        return s / x.size();
    };
    const double q = std::log(20.0);
    CHECK(mean_score(q) < mean_score(0.9 * q));
    CHECK(mean_score(q) < mean_score(1.1 * q));
}

TEST_CASE("coverage tests: reductions and reference values") {
    const auto null = uc_test_var(110, 5500, 0.02);
    CHECK(null.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(null.p_value == doctest::Approx(1.0));
    CHECK(uc_test_var(0, 100, 0.5).p_value < 1e-10);
    CHECK(uc_test_var(114, 5534, 0.02).expected == doctest::Approx(110.68).epsilon(1e-14));
    CHECK(uc_test_covar(3, 114, 0.05).expected == doctest::Approx(5.7).epsilon(1e-14));
    CHECK_THROWS_AS(uc_test_covar(0, 0, 0.05), DomainError);
    CHECK_THROWS_AS(uc_test_covar(5, 4, 0.05), DomainError);
    CHECK_THROWS_AS(uc_test_var(-1, 10, 0.05), DomainError);

    // VaR row of the reference coverage table: E_n per institution, n = 5534, p1 = 0.02.
    const int var_counts[] = {114, 115, 110, 112, 113, 117, 112, 107, 112, 114, 111, 116, 116, 118};
    const double var_p[] = {0.7511, 0.6802, 0.9479, 0.8993, 0.8243, 0.5476, 0.8993,
                            0.7224, 0.8993, 0.7511, 0.9755, 0.6122, 0.6122, 0.4868};
    for (int i = 0; i < 14; ++i) {
        const auto r = uc_test_var(var_counts[i], 5534, 0.02);
        CHECK(std::fabs(r.p_value - var_p[i]) <= 0.02);
        CHECK(r.p_value == doctest::Approx(kupiec_p_value(var_counts[i], 5534, 0.02)).epsilon(1e-10));
    }
    // CoVaR cells: (joint, E_n, p-value), including UNM/Log and HUM/HR.
    struct Cell {
        int joint, days;
        double p;
    };
    const Cell cells[] = {{3, 114, 0.2037}, {1, 116, 0.0121}, {1, 113, 0.0140}, {1, 107, 0.0187},
                          {5, 112, 0.7912}, {6, 117, 0.9495}, {8, 111, 0.3155}, {10, 117, 0.1082}};
    for (const auto& c : cells) {
        const auto r = uc_test_covar(c.joint, c.days, 0.05);
        CHECK(std::fabs(r.p_value - c.p) <= 0.02);
        CHECK(r.p_value == doctest::Approx(kupiec_p_value(c.joint, c.days, 0.05)).epsilon(1e-10));
    }
}

TEST_CASE("coverage p-value is unimodal in the count") {
    const int n = 1000;
    const double p = 0.03;  // expected 30
    for (int x = 0; x < 30; ++x) CHECK(uc_test_var(x, n, p).p_value <= uc_test_var(x + 1, n, p).p_value);
    for (int x = 30; x < n; ++x) CHECK(uc_test_var(x, n, p).p_value >= uc_test_var(x + 1, n, p).p_value);
}

TEST_CASE("comparative backtest") {
    std::vector<double> base(200);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (auto& v : base) v = 1 + 0.1 * z(rng);
    CHECK(comparative_backtest(series("a", base), series("b", base)).decision == Comparison::Inconclusive);
    CHECK(comparative_backtest(series("a", base), series("b", base)).statistic == 0.0);

    std::vector<double> plus1 = base;
    for (auto& v : plus1) v += 1;
    CHECK(comparative_backtest(series("a", plus1), series("b", base)).decision == Comparison::Worse);
    CHECK(comparative_backtest(series("a", base), series("b", plus1)).decision == Comparison::Better);

    const std::vector<double> few(20, 1.0);
    const auto short_run = comparative_backtest(series("a", few), series("b", few));
    CHECK(short_run.decision == Comparison::Inconclusive);
    CHECK_FALSE(short_run.warning.empty());
    CHECK_THROWS_AS(comparative_backtest(series("a", base), series("b", few)), DomainError);

    // Power and antisymmetry on i.i.d. differences with mean 0.2.
    int worse = 0;
    for (int s = 0; s < 100; ++s) {
        std::mt19937_64 r(100 + s);
        std::vector<double> comp(1000), ref(1000);
        for (std::size_t t = 0; t < comp.size(); ++t) {
            comp[t] = 2 + z(r);
            ref[t] = comp[t] + 0.2 + z(r);
        }
        const auto fwd = comparative_backtest(series("ref", ref), series("comp", comp));
        const auto bwd = comparative_backtest(series("comp", comp), series("ref", ref));
        if (fwd.decision == Comparison::Worse) ++worse;
        CHECK(bwd.statistic == doctest::Approx(-fwd.statistic));
        CHECK((fwd.decision == Comparison::Worse) == (bwd.decision == Comparison::Better));
    }
    CHECK(worse >= 95);
}

TEST_CASE("Newey-West variance") {
    const std::vector<double> d{1, -1, 1, -1, 1, -1};
    // Lag 0 is the plain (biased) variance.
    CHECK(newey_west_variance(d, 0) == doctest::Approx(1.0));
    // Lag 1 adds 2 (1 - 1/2) gamma_1 with gamma_1 = -5/6.
    CHECK(newey_west_variance(d, 1) == doctest::Approx(1.0 - 5.0 / 6).epsilon(1e-12));
}

TEST_CASE("pooling normalized scores") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    std::vector<double> r(100), c(100);
    for (std::size_t t = 0; t < r.size(); ++t) {
        r[t] = 2 + 0.3 * z(rng);
        c[t] = 2 + 0.3 * z(rng);
    }
    const ScorePair one{series("ref", r), series("comp", c)};
    const auto pooled = pool_normalized_scores(std::span<const ScorePair>(&one, 1));
    const double scale = one.reference.mean();
    REQUIRE(pooled.reference.scores.size() == 100);
    for (std::size_t t = 0; t < r.size(); ++t) {
        CHECK(pooled.reference.scores[t] == doctest::Approx(r[t] / scale));
        CHECK(pooled.competitor.scores[t] == doctest::Approx(c[t] / scale));
    }
    const std::vector<ScorePair> twins{one, one};
    const auto pt = pool_normalized_scores(twins);
    CHECK(comparative_backtest(pt.reference, pt.competitor).decision ==
          comparative_backtest(one.reference, one.competitor).decision);

    const std::vector<double> zeros(50, 0.0);
    const ScorePair degenerate{series("ref", zeros), series("comp", zeros)};
    CHECK_THROWS_AS(pool_normalized_scores(std::span<const ScorePair>(&degenerate, 1)), DomainError);
}

TEST_CASE("pooling makes mild evidence conclusive") {
    int pooled_significant = 0, individual_inconclusive = 0;
    const int runs = 20;
    std::normal_distribution<double> z;
    for (int s = 0; s < runs; ++s) {
        std::mt19937_64 rng(500 + s);
        std::vector<ScorePair> inst;
        for (int i = 0; i < 14; ++i) {
            const double shift = i < 10 ? 0.1 : 0.0;  // ten institutions mildly favor the competitor
            std::vector<double> ref(250), comp(250);
            for (std::size_t t = 0; t < ref.size(); ++t) {
                comp[t] = 3 + z(rng);
                ref[t] = comp[t] + shift + z(rng);
            }
            inst.push_back({series("ref", ref), series("comp", comp)});
            if (comparative_backtest(inst.back().reference, inst.back().competitor).decision == Comparison::Inconclusive)
                ++individual_inconclusive;
        }
        const auto pooled = pool_normalized_scores(inst);
        if (comparative_backtest(pooled.reference, pooled.competitor).decision == Comparison::Worse) ++pooled_significant;
    }
    CHECK(pooled_significant >= 18);
    CHECK(individual_inconclusive > runs * 14 / 2);
}
