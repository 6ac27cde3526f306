#include "covar/garch.hpp"

#include "covar/errors.hpp"
#include "covar/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace covar {

namespace {

constexpr int kMinLength = 250;

// Mean and standard deviation of the unstandardized skew-t built from a
// unit-variance t.
struct SkewMoments {
    double mu;
    double sigma;
};

SkewMoments skew_moments(double nu, double xi) {
    const double log_beta = std::lgamma(0.5) + std::lgamma(0.5 * nu) - std::lgamma(0.5 * nu + 0.5);
    const double m1 = 2.0 * std::sqrt(nu - 2.0) / ((nu - 1.0) * std::exp(log_beta));
    const double inv = 1.0 / xi;
    const double mu = m1 * (xi - inv);
    const double var = (1.0 - m1 * m1) * (xi * xi + inv * inv) + 2.0 * m1 * m1 - 1.0;
    return {mu, std::sqrt(var)};
}

// Log-density constants shared across observations.
struct SkewT {
    double nu, xi, mu, sigma, log_norm, t_scale;

    SkewT(double nu_, double xi_) : nu(nu_), xi(xi_) {
        const auto m = skew_moments(nu, xi);
        mu = m.mu;
        sigma = m.sigma;
        t_scale = std::sqrt(nu / (nu - 2.0));
        log_norm = std::log(2.0 / (xi + 1.0 / xi)) + std::log(sigma) + std::log(t_scale) +
                   std::lgamma(0.5 * nu + 0.5) - std::lgamma(0.5 * nu) -
                   0.5 * std::log(nu * std::numbers::pi);
    }

    double operator()(double z) const {
        const double zs = z * sigma + mu;
        const double u = (zs >= 0.0 ? zs / xi : zs * xi) * t_scale;
        return log_norm - 0.5 * (nu + 1.0) * std::log1p(u * u / nu);
    }
};

double sample_variance(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size() - 1);
}

double sample_mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double logistic_fn(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

constexpr double kZLimit = 30.0;
constexpr double kBoundaryZ = 12.0;

// Unconstrained coordinates, scaled by the series mean and variance so the
// optimum is equivariant under rescaling of the data.
struct Transform {
    double sd, var;

    GarchParams to_params(const Eigen::VectorXd& z_in) const {
        const Eigen::VectorXd z = z_in.cwiseMax(-kZLimit).cwiseMin(kZLimit);
        GarchParams p;
        p.alpha0 = z(0) * sd;
        p.alpha1 = std::tanh(z(1));
        p.beta0 = std::exp(z(2)) * var;
        const double persistence = logistic_fn(z(3));
        const double share = logistic_fn(z(4));
        p.beta1 = persistence * share;
        p.beta2 = persistence * (1.0 - share);
        p.nu = 2.0 + std::exp(z(5));
        p.xi = std::exp(z(6));
        return p;
    }

    Eigen::VectorXd to_z(const GarchParams& p) const {
        Eigen::VectorXd z(7);
        const double persistence = p.beta1 + p.beta2;
        z << p.alpha0 / sd, std::atanh(std::clamp(p.alpha1, -0.999999, 0.999999)),
            std::log(p.beta0 / var), logit(std::clamp(persistence, 1e-9, 1.0 - 1e-9)),
            logit(std::clamp(p.beta1 / std::max(persistence, 1e-12), 1e-9, 1.0 - 1e-9)),
            std::log(p.nu - 2.0), std::log(p.xi);
        return z;
    }
};

}  // namespace

double skew_t_logpdf(double z, double nu, double xi) {
    if (!(nu > 2.0) || !(xi > 0.0)) throw DomainError("skew_t_logpdf: need nu > 2 and xi > 0");
    return SkewT(nu, xi)(z);
}

double skew_t_draw(Rng& rng, double nu, double xi) {
    if (!(nu > 2.0) || !(xi > 0.0)) throw DomainError("skew_t_draw: need nu > 2 and xi > 0");
    std::student_t_distribution<double> t(nu);
    const double unit = std::abs(t(rng)) * std::sqrt((nu - 2.0) / nu);
    const bool positive = uniform_open(rng) < xi * xi / (1.0 + xi * xi);
    const double raw = positive ? xi * unit : -unit / xi;
    const auto m = skew_moments(nu, xi);
    return (raw - m.mu) / m.sigma;
}

bool GarchParams::valid() const {
    return beta0 > 0.0 && beta1 >= 0.0 && beta2 >= 0.0 && beta1 + beta2 < 1.0 &&
           std::abs(alpha1) < 1.0 && nu > 2.0 && xi > 0.0 && std::isfinite(alpha0);
}

GarchPath garch_filter(const GarchParams& p, std::span<const double> x) {
    if (x.size() < 2) throw DomainError("garch_filter: need at least two observations");
    const auto n = static_cast<Eigen::Index>(x.size());
    GarchPath path;
    path.cond_mean.resize(n);
    path.cond_vol.resize(n);
    double var = sample_variance(x);
    double prev_x = x[0];
    double prev_eps2 = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (t > 0) var = p.beta0 + p.beta1 * prev_eps2 + p.beta2 * var;
        const double mu = p.alpha0 + p.alpha1 * prev_x;
        path.cond_mean(t) = mu;
        path.cond_vol(t) = std::sqrt(var);
        const double xt = x[static_cast<std::size_t>(t)];
        prev_eps2 = (xt - mu) * (xt - mu);
        prev_x = xt;
    }
    path.next_mean = p.alpha0 + p.alpha1 * prev_x;
    path.next_vol = std::sqrt(p.beta0 + p.beta1 * prev_eps2 + p.beta2 * var);
    return path;
}

double garch_loglik(const GarchParams& p, std::span<const double> x) {
    if (!p.valid()) return -std::numeric_limits<double>::infinity();
    const SkewT density(p.nu, p.xi);
    double var = sample_variance(x);
    double prev_x = x[0];
    double prev_eps2 = 0.0;
    double ll = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (t > 0) var = p.beta0 + p.beta1 * prev_eps2 + p.beta2 * var;
        const double eps = x[t] - (p.alpha0 + p.alpha1 * prev_x);
        const double sd = std::sqrt(var);
        ll += density(eps / sd) - std::log(sd);
        prev_eps2 = eps * eps;
        prev_x = x[t];
    }
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
}

GarchFit fit_ar_garch(std::span<const double> x, const GarchOptions& options) {
    if (x.size() < static_cast<std::size_t>(kMinLength))
        throw DomainError("fit_ar_garch: need at least 250 observations");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("fit_ar_garch: non-finite observation");
    const double var = sample_variance(x);
    if (!(var > 0.0)) throw DomainError("fit_ar_garch: series has zero variance");
    const Transform tr{std::sqrt(var), var};

    // Adding n log(sd) makes the objective, and so every optimizer step, invariant
    // to rescaling the data.
    const double shift = static_cast<double>(x.size()) * std::log(tr.sd);
    auto objective = [&](const Eigen::VectorXd& z) { return -(garch_loglik(tr.to_params(z), x) + shift); };

    GarchParams init;
    init.alpha0 = sample_mean(x);
    init.beta0 = 0.05 * var;
    init.beta1 = 0.08;
    init.beta2 = 0.87;
    init.nu = 8.0;
    init.xi = 1.0;
    std::vector<Eigen::VectorXd> starts{tr.to_z(init)};
    Rng rng(stream_seed(options.seed, 0));
    std::normal_distribution<double> jitter(0.0, 0.75);
    for (int r = 0; r < options.random_restarts; ++r) {
        Eigen::VectorXd z = starts.front();
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += jitter(rng);
        starts.push_back(z);
    }

    GarchFit best;
    best.loglik = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_z;
    for (const auto& z0 : starts) {
        const auto m = opt::bfgs(objective, z0, options.bfgs);
        best.iterations += m.iterations;
        if (std::isfinite(m.value) && -m.value - shift > best.loglik) {
            best.loglik = -m.value - shift;
            best.converged = m.converged;
            best_z = m.x;
        }
    }
    if (best_z.size() == 0) throw GarchFitError("GARCH likelihood is not finite at any start", best);
    best.params = tr.to_params(best_z);
    best.boundary = (best_z.tail(5).array().abs() > kBoundaryZ).any();
    auto path = garch_filter(best.params, x);
    best.cond_mean = std::move(path.cond_mean);
    best.cond_vol = std::move(path.cond_vol);
    best.next_mean = path.next_mean;
    best.next_vol = path.next_vol;
    if (!best.converged) throw GarchFitError("GARCH fit did not converge", best);
    return best;
}

std::vector<double> realized_residuals(std::span<const double> x, const GarchFit& fit) {
    if (static_cast<Eigen::Index>(x.size()) != fit.cond_mean.size())
        throw DomainError("realized_residuals: series length differs from the fitted paths");
    std::vector<double> z(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        z[t] = (x[t] - fit.cond_mean(i)) / fit.cond_vol(i);
    }
    return z;
}

std::vector<double> simulate_ar_garch(const GarchParams& p, int n, std::uint64_t seed, int burn_in) {
    if (!p.valid()) throw DomainError("simulate_ar_garch: invalid parameters");
    if (n < 1 || burn_in < 0) throw DomainError("simulate_ar_garch: need n >= 1, burn_in >= 0");
    Rng rng(seed);
    double var = p.beta0 / (1.0 - p.beta1 - p.beta2);
    double prev_x = p.alpha0 / (1.0 - p.alpha1);
    double prev_eps2 = var;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n + burn_in; ++t) {
        var = p.beta0 + p.beta1 * prev_eps2 + p.beta2 * var;
        const double eps = std::sqrt(var) * skew_t_draw(rng, p.nu, p.xi);
        const double xt = p.alpha0 + p.alpha1 * prev_x + eps;
        if (t >= burn_in) out.push_back(xt);
        prev_eps2 = eps * eps;
        prev_x = xt;
    }
    return out;
}

}  // namespace covar
