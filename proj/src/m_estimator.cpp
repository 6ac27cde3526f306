#include "covar/m_estimator.hpp"

#include "covar/errors.hpp"
#include "covar/quadrature.hpp"
#include "covar/rng.hpp"
#include "covar/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace covar {

namespace {

constexpr double kMaxUnconstrained = 25.0;
// |z| > 6.9 puts a parameter within about 1e-3 of an edge of its range.
constexpr double kBoundaryUnconstrained = 6.9;

double logistic_fn(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

void check_g(Family family, const TestFunctionSet& g) {
    if (static_cast<int>(g.size()) < arity(family))
        throw DomainError("need at least as many moment functions as parameters");
}

}  // namespace

Eigen::VectorXd phi(const TdfModel& model, const TestFunctionSet& g, double abs_tol) {
    const auto q = static_cast<Eigen::Index>(g.size());
    auto integrand = [&](double t) -> Eigen::VectorXd {
        Eigen::VectorXd v(q);
        const double lower = eval_r(model, 1.0, t);
        const double upper = eval_r(model, t, 1.0);
        for (Eigen::Index j = 0; j < q; ++j) {
            v(j) = lower * g.funcs[j].lower_triangle_weight(t) +
                   upper * g.funcs[j].upper_triangle_weight(t);
        }
        return v;
    };
    return quad::integrate(integrand, 0.0, 1.0, abs_tol).value;
}

Eigen::VectorXd empirical_phi(const RankVectors& ranks, int m, const TestFunctionSet& g) {
    const auto n = static_cast<int>(ranks.rx.size());
    if (m < 1 || m > n) throw DomainError("empirical_phi: m must lie in [1, n]");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    for (int i = 0; i < n; ++i) {
        // Observation i is counted once x >= a and y >= b.
        const double a = (n + 0.5 - ranks.rx[i]) / m;
        const double b = (n + 0.5 - ranks.ry[i]) / m;
        if (a >= 1.0 || b >= 1.0) continue;
        for (std::size_t j = 0; j < g.size(); ++j)
            out(static_cast<Eigen::Index>(j)) += g.funcs[j].upper_rectangle_integral(a, b);
    }
    return out / m;
}

Eigen::VectorXd empirical_phi(const LossPairSample& sample, int m, const TestFunctionSet& g) {
    return empirical_phi(compute_ranks(sample), m, g);
}

Eigen::VectorXd to_unconstrained(Family family, const Eigen::VectorXd& p) {
    Eigen::VectorXd z(p.size());
    auto bounded = [](double v) {
        return std::clamp(logit(std::clamp(v, 1e-12, 1.0 - 1e-12)), -kMaxUnconstrained,
                          kMaxUnconstrained);
    };
    switch (family) {
        case Family::Logistic:
        case Family::Bilogistic:
        case Family::AsymLogistic:
            for (Eigen::Index i = 0; i < p.size(); ++i) z(i) = bounded(p(i));
            break;
        case Family::HuslerReiss: z(0) = std::log(p(0)); break;
        case Family::StudentT:
            z(0) = std::log(p(0));
            z(1) = bounded(p(1));
            break;
    }
    return z;
}

Eigen::VectorXd from_unconstrained(Family family, const Eigen::VectorXd& z_in) {
    const Eigen::VectorXd z = z_in.cwiseMax(-kMaxUnconstrained).cwiseMin(kMaxUnconstrained);
    Eigen::VectorXd p(z.size());
    switch (family) {
        case Family::Logistic:
        case Family::Bilogistic:
        case Family::AsymLogistic:
            for (Eigen::Index i = 0; i < z.size(); ++i) p(i) = logistic_fn(z(i));
            break;
        case Family::HuslerReiss: p(0) = std::exp(z(0)); break;
        case Family::StudentT:
            p(0) = std::exp(z(0));
            p(1) = logistic_fn(z(1));
            break;
    }
    // Keep open intervals open after rounding.
    if (family == Family::Bilogistic) p = p.cwiseMax(1e-12).cwiseMin(1.0 - 1e-12);
    if (family == Family::StudentT) p(1) = std::clamp(p(1), 1e-12, 1.0 - 1e-12);
    return p;
}

Eigen::VectorXd initial_parameters(Family family, double tdc) {
    const double lambda = std::clamp(tdc, 0.05, 0.95);
    // Logistic: R(1,1) = 2 - 2^theta.
    const double theta_log = std::clamp(std::log2(2.0 - lambda), 0.05, 0.95);
    switch (family) {
        case Family::Logistic: return Eigen::VectorXd::Constant(1, theta_log);
        case Family::HuslerReiss:
            // R(1,1) = 2 Phi(-1/theta).
            return Eigen::VectorXd::Constant(1, -1.0 / special::normal_quantile(0.5 * lambda));
        case Family::Bilogistic: return Eigen::Vector2d(theta_log, theta_log);
        case Family::AsymLogistic: return Eigen::Vector3d(theta_log, 0.9, 0.9);
        case Family::StudentT: return Eigen::Vector2d(4.0, 0.5);
    }
    throw DomainError("unknown family");
}

MEstimatorFit fit_tdf_to_moments(const Eigen::VectorXd& target, Family family,
                                 const TestFunctionSet& g, const MEstimatorOptions& options,
                                 double tdc_for_init) {
    check_g(family, g);
    if (target.size() != static_cast<Eigen::Index>(g.size()))
        throw DomainError("moment target size does not match the test functions");

    auto objective = [&](const Eigen::VectorXd& z) {
        const TdfModel model(family, from_unconstrained(family, z));
        return (phi(model, g) - target).squaredNorm();
    };

    Eigen::VectorXd init = options.init ? *options.init : initial_parameters(family, tdc_for_init);
    if (!parameters_valid(family, init))
        throw DomainError("initial parameters outside the family's parameter space");

    std::vector<Eigen::VectorXd> starts{to_unconstrained(family, init)};
    Rng rng(stream_seed(options.seed, 0));
    std::uniform_real_distribution<double> unit(-2.5, 2.5);
    for (int r = 0; r < options.random_restarts; ++r) {
        Eigen::VectorXd z(init.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = unit(rng);
        if (family == Family::HuslerReiss) z(0) = std::log(0.2) + (unit(rng) + 2.5) / 5.0 * std::log(25.0);
        if (family == Family::StudentT) z(0) = (unit(rng) + 2.5) / 5.0 * std::log(30.0);
        starts.push_back(z);
    }

    MEstimatorFit best;
    best.family = family;
    best.objective_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_z;
    for (const auto& z0 : starts) {
        const auto result = opt::nelder_mead(objective, z0, options.simplex);
        best.iterations += result.iterations;
        if (result.value < best.objective_value) {
            best.objective_value = result.value;
            best.converged = result.converged;
            best_z = result.x;
        }
    }
    best.theta_hat = from_unconstrained(family, best_z);
    best.boundary = (best_z.array().abs() > kBoundaryUnconstrained).any();
    if (!best.converged) throw FitError("M-estimator did not converge", best);
    return best;
}

MEstimatorFit fit_tdf(const LossPairSample& sample, int m, Family family,
                      const TestFunctionSet& g, const MEstimatorOptions& options) {
    const auto ranks = compute_ranks(sample);
    const Eigen::VectorXd target = empirical_phi(ranks, m, g);
    try {
        auto fit = fit_tdf_to_moments(target, family, g, options, r_hat(ranks, m, 1.0, 1.0));
        fit.m = m;
        return fit;
    } catch (const FitError& e) {
        auto best = e.best();
        best.m = m;
        throw FitError(e.what(), std::move(best));
    }
}

}  // namespace covar
