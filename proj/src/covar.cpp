#include "covar/covar.hpp"

#include "covar/errors.hpp"
#include "covar/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace covar {

namespace {

constexpr double kEtaTol = 1e-14;
// Largest argument tried when R(1, 1) < p2, to tell "no root" from "root beyond 1".
constexpr double kFarArgument = 1e8;

}  // namespace

void RiskLevel::validate() const {
    if (!(p1 > 0.0 && p1 < 1.0) || !(p2 > 0.0 && p2 < 1.0))
        throw DomainError("risk levels must lie in (0,1)");
}

double solve_eta_star(const TdfModel& model, const RiskLevel& levels) {
    levels.validate();
    auto f = [&](double s) { return eval_r(model, 1.0, s) - levels.p2; };
    const double scale = levels.p1 / levels.p2;
    if (f(1.0) < 0.0) {
        if (f(kFarArgument) < 0.0)
            throw NoSolutionError("R(1, .) stays below p2 = " + std::to_string(levels.p2) +
                                  ": dependence too close to tail independence");
        const double s = roots::bisect(f, 1.0, kFarArgument, 0.0, 1e-13);
        throw BracketExceededError("adjustment root lies beyond R(1, 1)", s * scale);
    }
    // R(1, 0) = 0 < p2, so (0, 1] brackets the root.
    const double s = roots::bisect(f, 0.0, 1.0, kEtaTol / std::max(1.0, scale));
    const double eta = s * scale;
    if (eta > 1.0 + 1e-9) throw BracketExceededError("adjustment factor above 1", eta);
    return eta;
}

double compose_covar(double threshold, int k2, int n, double p2, double gamma, double eta) {
    return threshold * std::pow(k2 / (n * p2), gamma) * std::pow(eta, -gamma);
}

CovarEstimate estimate_covar(const LossPairSample& sample, Family family,
                             const RiskLevel& levels, const CovarConfig& config) {
    levels.validate();
    CovarEstimate est;
    est.levels = levels;
    est.n = static_cast<int>(sample.size());
    est.m = config.m;

    if (config.fixed_eta_star) {
        est.eta_star_hat = *config.fixed_eta_star;
        if (!(est.eta_star_hat > 0.0 && est.eta_star_hat <= 1.0))
            throw DomainError("fixed adjustment factor must lie in (0,1]");
    } else {
        const auto g = config.g ? *config.g : default_test_functions(family);
        est.tdf_fit = fit_tdf(sample, config.m, family, g, config.fit);
        est.eta_star_hat = solve_eta_star(est.tdf_fit->model(), levels);
    }

    const auto ys = sample.ys();
    if (config.k1) {
        est.k1 = *config.k1;
    } else {
        est.k_selection = select_k_bootstrap(ys, config.bootstrap);
        est.k1 = est.k_selection->k;
    }
    est.k2 = config.k2 ? *config.k2 : est.k1;
    est.gamma_hat = config.fixed_gamma ? *config.fixed_gamma : hill(ys, est.k1);

    est.threshold = upper_order_statistic(ys, est.k2);
    est.var_component = weissman_quantile(ys, est.k2, est.gamma_hat, levels.p2);
    est.value = est.var_component * std::pow(est.eta_star_hat, -est.gamma_hat);
    return est;
}

double true_covar_oracle(const GenerativeModel& dist, const RiskLevel& levels) {
    levels.validate();
    const double a = dist.margin_quantile(1.0 - levels.p1);
    const double target = levels.p1 * levels.p2;
    auto f = [&](double y) { return dist.joint_survival(a, y) - target; };
    // At the (1 - p1 p2) quantile of Y the joint survival is at most p1 p2; far in
    // the left tail it approaches p1 > p1 p2.
    double hi = dist.margin_quantile(1.0 - target);
    double lo = dist.margin_quantile(1e-6);
    if (f(lo) < 0.0 || f(hi) > 0.0) throw NumericError("true CoVaR root is not bracketed");
    return roots::bisect(f, lo, hi, 0.0, 1e-12);
}

double exact_eta_p(const GenerativeModel& dist, const RiskLevel& levels) {
    return dist.margin_sf(true_covar_oracle(dist, levels)) / levels.p2;
}

}  // namespace covar
