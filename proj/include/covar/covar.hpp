#pragma once

#include "covar/empirical_tdf.hpp"
#include "covar/generative_model.hpp"
#include "covar/m_estimator.hpp"
#include "covar/tdf.hpp"
#include "covar/test_functions.hpp"
#include "covar/univariate_tail.hpp"

#include <optional>

namespace covar {

/// Tail probabilities of the conditioning event (p1) and of the conditional
/// quantile (p2). CoVaR at level 1-p uses p1 = p2 = p.
struct RiskLevel {
    double p1 = 0.05;
    double p2 = 0.05;

    static RiskLevel single(double p) { return {p, p}; }
    /// Throws DomainError unless both lie in (0, 1).
    void validate() const;
};

/// Adjustment factor eta* solving R(1, eta* p2 / p1) = p2.
///
/// Throws NoSolutionError when R(1, .) never reaches p2 (dependence too close to
/// tail independence) and BracketExceededError when the root requires an
/// argument above 1 or gives eta* > 1.
double solve_eta_star(const TdfModel& model, const RiskLevel& levels);

struct CovarConfig {
    int m = 0;                            ///< tail sample fraction for the M-estimator
    std::optional<int> k1;                ///< Hill fraction; bootstrap-selected when unset
    std::optional<int> k2;                ///< quantile fraction; equals k1 when unset
    std::optional<TestFunctionSet> g;     ///< family default when unset
    MEstimatorOptions fit{};
    BootstrapConfig bootstrap{};
    std::optional<double> fixed_gamma;    ///< replaces the Hill estimate
    std::optional<double> fixed_eta_star; ///< skips the M-estimator and the root solve
};

/// The composed estimate with every ingredient needed to recompute it.
struct CovarEstimate {
    double value = 0.0;
    double eta_star_hat = 0.0;
    double gamma_hat = 0.0;
    double var_component = 0.0;  ///< Weissman VaR of the system at p2
    double threshold = 0.0;      ///< Y_{n,n-k2}
    int k1 = 0;
    int k2 = 0;
    int m = 0;
    int n = 0;
    RiskLevel levels{};
    std::optional<MEstimatorFit> tdf_fit;
    std::optional<KSelection> k_selection;
};

/// threshold (k2 / (n p2))^gamma eta^(-gamma).
double compose_covar(double threshold, int k2, int n, double p2, double gamma, double eta);

/// Full pipeline on a loss sample: M-estimator fit, eta* solve, Hill estimate,
/// Weissman VaR of the system at p2, then VaR * eta*^(-gamma).
CovarEstimate estimate_covar(const LossPairSample& sample, Family family,
                             const RiskLevel& levels, const CovarConfig& config);

/// True CoVaR of a known distribution: the y with
/// P(X > VaR_X(p1), Y > y) = p1 p2.
double true_covar_oracle(const GenerativeModel& dist, const RiskLevel& levels);
inline double true_covar_oracle(const GenerativeModel& dist, double p) {
    return true_covar_oracle(dist, RiskLevel::single(p));
}

/// Exact adjustment factor P(Y > CoVaR) / p2 of a known distribution.
double exact_eta_p(const GenerativeModel& dist, const RiskLevel& levels);
inline double exact_eta_p(const GenerativeModel& dist, double p) {
    return exact_eta_p(dist, RiskLevel::single(p));
}

}  // namespace covar
