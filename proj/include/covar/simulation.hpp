#pragma once

#include "covar/covar.hpp"
#include "covar/empirical_tdf.hpp"
#include "covar/generative_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covar {

/// n pairs from an extreme value family with unit Frechet margins. X is drawn
/// by inverting its margin; Y by a bracketed root solve on the conditional CDF
///   P(Y <= y | X = x) = exp(-1/y + R(1/x, 1/y)) (1 - R_1(1/x, 1/y)).
LossPairSample sample_bivariate_evd(const GenerativeModel& model, int n, std::uint64_t seed);

/// n pairs from the standard bivariate t: correlated normals scaled by sqrt(nu / chi2_nu).
LossPairSample sample_bivariate_t(double nu, double rho, int n, std::uint64_t seed);

/// Dispatches on the model's margins.
LossPairSample sample(const GenerativeModel& model, int n, std::uint64_t seed);

/// Reference simulation settings for a family: parameters, n, m, g.
struct StudySetting {
    TdfModel model;
    int n;
    int m;
    TestFunctionSet g;
};
StudySetting reference_setting(Family family);

enum class Variant { Full, TrueGamma, TrueEtaStar, TrueEta };
inline constexpr Variant kAllVariants[] = {Variant::Full, Variant::TrueGamma,
                                           Variant::TrueEtaStar, Variant::TrueEta};
std::string_view to_string(Variant v);

struct McStudyConfig {
    explicit McStudyConfig(GenerativeModel dist) : model(std::move(dist)) {}

    GenerativeModel model;
    int n = 2000;
    int reps = 100;
    double p = 0.05;
    int m = 180;
    TestFunctionSet g;
    std::vector<Variant> variants{std::begin(kAllVariants), std::end(kAllVariants)};
    std::uint64_t master_seed = 20240501;
    int threads = 0;  ///< <= 0 uses all cores
    BootstrapConfig bootstrap{};
    MEstimatorOptions fit{};
    std::optional<int> k;  ///< fixed k1 = k2 instead of the bootstrap choice

    static McStudyConfig reference(Family family);
};

/// Per-replication ingredients. Variant estimates are NaN when the replication failed.
struct McReplication {
    int index = 0;
    bool ok = false;
    std::string error;
    Eigen::VectorXd theta_hat;
    double gamma_hat = 0.0;
    double eta_star_hat = 0.0;
    double var_hat = 0.0;  ///< Weissman VaR of Y at p
    int k = 0;
    std::vector<double> estimates;  ///< one per configured variant
};

struct VariantSummary {
    Variant variant;
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    int count = 0;
};

struct McSummary {
    double true_covar = 0.0;
    double true_gamma = 0.0;
    double true_eta_star = 0.0;
    double true_eta = 0.0;
    int failures = 0;
    std::vector<VariantSummary> variants;
    std::vector<McReplication> replications;
};

/// Monte Carlo study of the CoVaR estimator and its held-fixed variants, where
/// one ingredient (gamma, eta*, or the exact eta_p) is replaced by its true value.
/// Replication i draws from stream i of the master seed, so the result does not
/// depend on the thread count. Failed replications are counted, not fatal.
McSummary mc_study(const McStudyConfig& config);

}  // namespace covar
