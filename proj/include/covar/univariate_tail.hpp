#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace covar {

/// Hill/Weissman ingredients for one margin.
struct TailFit {
    double gamma_hat = 0.0;
    int k1 = 0;  ///< Hill sample fraction
    int k2 = 0;  ///< quantile sample fraction
    int n = 0;
};

/// (k+1)-th largest value, i.e. the order statistic Y_{n,n-k}.
double upper_order_statistic(std::span<const double> ys, int k);

/// Hill estimator of the tail index from the k1 largest observations.
double hill(std::span<const double> ys, int k1);

/// Weissman extrapolation Y_{n,n-k2} (k2 / (n p))^gamma of the quantile with
/// exceedance probability p.
double weissman_quantile(std::span<const double> ys, int k2, double gamma, double p);

struct BootstrapConfig {
    double subsample_exponent = 0.955;  ///< n1 = ceil(n^exponent)
    int resamples = 500;
    std::uint64_t seed = 0x6b736571;
    int threads = 1;
};

struct KSelection {
    int k = 0;
    int k_star_n1 = 0;  ///< criterion minimizer at subsample size n1
    int k_star_n2 = 0;  ///< criterion minimizer at subsample size n2
    int n1 = 0;
    int n2 = 0;
    bool fallback = false;  ///< criterion was degenerate; k = ceil(0.05 n)
};

/// Two-step subsample bootstrap choice of the Hill sample fraction. The
/// per-size criterion is the bootstrap mean of (M2(k) - 2 H(k)^2)^2, with M2 the
/// second log-spacing moment and H the Hill estimate; the two minimizers are
/// combined through the second-order extrapolation rule and clamped to [10, n/2].
KSelection select_k_bootstrap(std::span<const double> ys, const BootstrapConfig& config = {});

struct SensitivityPoint {
    int k2;
    double var_hat;
};

/// Weissman quantile across k2 in [k_lo, k_hi] for a fixed gamma.
std::vector<SensitivityPoint> var_sensitivity(std::span<const double> ys, double gamma, double p,
                                              int k_lo, int k_hi);

struct HillPoint {
    int k;
    double gamma_hat;
};

/// Hill estimates for k in [k_lo, k_hi] (Hill plot data).
std::vector<HillPoint> hill_curve(std::span<const double> ys, int k_lo, int k_hi);

}  // namespace covar
