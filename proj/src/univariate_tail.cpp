#include "covar/univariate_tail.hpp"

#include "covar/errors.hpp"
#include "covar/parallel.hpp"
#include "covar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace covar {

namespace {

void check_k(std::size_t n, int k, const char* what) {
    if (k < 1 || static_cast<std::size_t>(k) >= n)
        throw DomainError(std::string(what) + ": need 1 <= k < n (k=" + std::to_string(k) +
                          ", n=" + std::to_string(n) + ")");
}

// Largest k+1 values in descending order.
std::vector<double> top_descending(std::span<const double> ys, int k) {
    std::vector<double> v(ys.begin(), ys.end());
    std::partial_sort(v.begin(), v.begin() + k + 1, v.end(), std::greater<>());
    v.resize(static_cast<std::size_t>(k) + 1);
    return v;
}

}  // namespace

double upper_order_statistic(std::span<const double> ys, int k) {
    check_k(ys.size(), k, "upper_order_statistic");
    std::vector<double> v(ys.begin(), ys.end());
    std::nth_element(v.begin(), v.begin() + k, v.end(), std::greater<>());
    return v[static_cast<std::size_t>(k)];
}

double hill(std::span<const double> ys, int k1) {
    check_k(ys.size(), k1, "hill");
    const auto top = top_descending(ys, k1);
    const double threshold = top[static_cast<std::size_t>(k1)];
    if (!(threshold > 0.0))
        throw DomainError("hill: threshold order statistic must be positive");
    double sum = 0.0;
    for (int i = 0; i < k1; ++i) sum += std::log(top[static_cast<std::size_t>(i)] / threshold);
    return sum / k1;
}

double weissman_quantile(std::span<const double> ys, int k2, double gamma, double p) {
    check_k(ys.size(), k2, "weissman_quantile");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("weissman_quantile: p must lie in (0,1)");
    if (!(gamma >= 0.0)) throw DomainError("weissman_quantile: gamma must be nonnegative");
    const double base = upper_order_statistic(ys, k2);
    const double n = static_cast<double>(ys.size());
    return base * std::pow(k2 / (n * p), gamma);
}

namespace {

// Bootstrap criterion Q(k), k = 1..size-1, accumulated over resamples of `size`.
int bootstrap_minimizer(std::span<const double> ys, int size, const BootstrapConfig& config,
                        std::uint64_t stream_offset) {
    const int kmax = size - 1;
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(config.resamples));
    parallel_for(static_cast<std::size_t>(config.resamples), config.threads, [&](std::size_t b) {
        Rng rng = make_stream(config.seed, stream_offset + b);
        std::uniform_int_distribution<std::size_t> pick(0, ys.size() - 1);
        std::vector<double> draw(static_cast<std::size_t>(size));
        for (auto& v : draw) v = ys[pick(rng)];
        std::sort(draw.begin(), draw.end(), std::greater<>());
        auto& q = partial[b];
        q.assign(static_cast<std::size_t>(kmax), std::numeric_limits<double>::infinity());
        double sum_log = 0.0, sum_log2 = 0.0;
        for (int k = 1; k <= kmax; ++k) {
            const double top = draw[static_cast<std::size_t>(k - 1)];
            const double threshold = draw[static_cast<std::size_t>(k)];
            if (!(threshold > 0.0)) break;
            sum_log += std::log(top);
            sum_log2 += std::log(top) * std::log(top);
            const double lt = std::log(threshold);
            const double h = sum_log / k - lt;
            const double m2 = sum_log2 / k - 2.0 * lt * sum_log / k + lt * lt;
            const double d = m2 - 2.0 * h * h;
            q[static_cast<std::size_t>(k - 1)] = d * d;
        }
    });
    std::vector<double> total(static_cast<std::size_t>(kmax), 0.0);
    for (const auto& q : partial)
        for (std::size_t k = 0; k < total.size(); ++k) total[k] += q[k];
    const auto it = std::min_element(total.begin(), total.end());
    if (!std::isfinite(*it)) return 0;
    return static_cast<int>(it - total.begin()) + 1;
}

}  // namespace

KSelection select_k_bootstrap(std::span<const double> ys, const BootstrapConfig& config) {
    const auto n = static_cast<int>(ys.size());
    if (n < 500) throw DomainError("select_k_bootstrap: need at least 500 observations");
    if (config.resamples < 1) throw DomainError("select_k_bootstrap: need resamples >= 1");
    if (!(config.subsample_exponent > 0.5 && config.subsample_exponent < 1.0))
        throw DomainError("select_k_bootstrap: subsample exponent must lie in (0.5, 1)");
    KSelection out;
    out.n1 = static_cast<int>(std::ceil(std::pow(n, config.subsample_exponent)));
    out.n1 = std::min(out.n1, n - 1);
    out.n2 = static_cast<int>(std::ceil(static_cast<double>(out.n1) * out.n1 / n));
    out.k_star_n1 = bootstrap_minimizer(ys, out.n1, config, 0);
    out.k_star_n2 = bootstrap_minimizer(ys, out.n2, config, 1u << 20);

    const int lo = 10, hi = n / 2;
    double k0 = std::numeric_limits<double>::quiet_NaN();
    if (out.k_star_n1 > 1 && out.k_star_n2 > 0) {
        const double k1 = out.k_star_n1, k2 = out.k_star_n2;
        const double log_n1 = std::log(static_cast<double>(out.n1));
        const double log_k1 = std::log(k1);
        const double denom = 2.0 * log_n1 - log_k1;
        k0 = k1 * k1 / k2 *
             std::pow(log_k1 * log_k1 / (denom * denom), (log_n1 - log_k1) / log_n1);
    }
    if (!std::isfinite(k0) || k0 < 1.0) {
        out.fallback = true;
        out.k = std::clamp(static_cast<int>(std::ceil(0.05 * n)), lo, hi);
        return out;
    }
    out.k = std::clamp(static_cast<int>(std::lround(k0)), lo, hi);
    return out;
}

std::vector<SensitivityPoint> var_sensitivity(std::span<const double> ys, double gamma, double p,
                                              int k_lo, int k_hi) {
    const auto n = static_cast<int>(ys.size());
    if (k_lo < 1 || k_hi >= n || k_lo > k_hi)
        throw DomainError("var_sensitivity: k range must satisfy 1 <= lo <= hi <= n-1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("var_sensitivity: p must lie in (0,1)");
    std::vector<double> sorted(ys.begin(), ys.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<SensitivityPoint> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        out.push_back({k, sorted[static_cast<std::size_t>(k)] * std::pow(k / (n * p), gamma)});
    }
    return out;
}

std::vector<HillPoint> hill_curve(std::span<const double> ys, int k_lo, int k_hi) {
    const auto n = static_cast<int>(ys.size());
    if (k_lo < 1 || k_hi >= n || k_lo > k_hi)
        throw DomainError("hill_curve: k range must satisfy 1 <= lo <= hi <= n-1");
    std::vector<double> sorted(ys.begin(), ys.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<HillPoint> out;
    double sum_log = 0.0;
    for (int k = 1; k <= k_hi; ++k) {
        sum_log += std::log(sorted[static_cast<std::size_t>(k - 1)]);
        if (k < k_lo) continue;
        const double threshold = sorted[static_cast<std::size_t>(k)];
        if (!(threshold > 0.0)) break;
        out.push_back({k, sum_log / k - std::log(threshold)});
    }
    return out;
}

}  // namespace covar
