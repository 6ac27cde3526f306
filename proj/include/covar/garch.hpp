#pragma once

#include "covar/optimize.hpp"
#include "covar/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace covar {

/// Log-density of the Fernandez-Steel skew-t, shifted and scaled to zero mean
/// and unit variance. nu > 2, xi > 0; xi = 1 is the unit-variance Student t.
double skew_t_logpdf(double z, double nu, double xi);

/// One draw from the same standardized skew-t.
double skew_t_draw(Rng& rng, double nu, double xi);

/// AR(1)-GARCH(1,1) with standardized skew-t innovations:
///   X_t = mu_t + sigma_t Z_t,  mu_t = alpha0 + alpha1 X_{t-1},
///   sigma_t^2 = beta0 + beta1 (X_{t-1} - mu_{t-1})^2 + beta2 sigma_{t-1}^2.
struct GarchParams {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double beta0 = 1.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double nu = 8.0;
    double xi = 1.0;

    /// beta0 > 0, beta1, beta2 >= 0, beta1 + beta2 < 1, |alpha1| < 1, nu > 2, xi > 0.
    bool valid() const;
};

/// Conditional means and volatilities over a series plus the one-step-ahead values.
struct GarchPath {
    Eigen::VectorXd cond_mean;
    Eigen::VectorXd cond_vol;
    double next_mean = 0.0;
    double next_vol = 0.0;
};

/// Runs the recursions. The first mean uses X_1 as its own lag and the first
/// variance is the sample variance of the series.
GarchPath garch_filter(const GarchParams& params, std::span<const double> series);

double garch_loglik(const GarchParams& params, std::span<const double> series);

struct GarchFit {
    GarchParams params;
    double loglik = 0.0;
    Eigen::VectorXd cond_mean;
    Eigen::VectorXd cond_vol;
    double next_mean = 0.0;
    double next_vol = 0.0;
    int iterations = 0;
    bool converged = false;
    bool boundary = false;  ///< persistence or shape parameters pinned at a transform limit
};

class GarchFitError : public std::runtime_error {
public:
    GarchFitError(const std::string& what, GarchFit best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const GarchFit& best() const noexcept { return best_; }

private:
    GarchFit best_;
};

struct GarchOptions {
    int random_restarts = 5;
    std::uint64_t seed = 0x6a7c;
    opt::BfgsOptions bfgs{};
};

/// Maximum likelihood over a transformed parameter space that enforces
/// stationarity. Needs at least 250 finite observations with positive variance.
GarchFit fit_ar_garch(std::span<const double> series, const GarchOptions& options = {});

/// (X_t - mu_t) / sigma_t along the fitted paths.
std::vector<double> realized_residuals(std::span<const double> series, const GarchFit& fit);

/// Simulated path of length n after `burn_in` discarded steps.
std::vector<double> simulate_ar_garch(const GarchParams& params, int n, std::uint64_t seed,
                                      int burn_in = 500);

}  // namespace covar
