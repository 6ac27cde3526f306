#include "covar/simulation.hpp"

#include "covar/errors.hpp"
#include "covar/parallel.hpp"
#include "covar/rng.hpp"
#include "covar/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace covar {

namespace {

constexpr double kLogYLimit = 50.0;
constexpr double kLogYTol = 1e-13;

// Conditional CDF of Y given X = x for unit Frechet margins, minus the target v.
double conditional_gap(const TdfModel& dep, double inv_x, double log_y, double v) {
    const double inv_y = std::exp(-log_y);
    const auto rg = eval_r_grad(dep, inv_x, inv_y);
    return std::exp(-inv_y + rg.r) * (1.0 - rg.d1) - v;
}

}  // namespace

LossPairSample sample_bivariate_evd(const GenerativeModel& model, int n, std::uint64_t seed) {
    if (model.margins() != Margins::UnitFrechet)
        throw DomainError("sample_bivariate_evd: model must have Frechet margins");
    if (n < 2) throw DomainError("sample_bivariate_evd: need n >= 2");
    const auto& dep = model.dependence();
    Rng rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = uniform_open(rng);
        const double v = uniform_open(rng);
        const double x = -1.0 / std::log(u);
        const double inv_x = 1.0 / x;
        auto gap = [&](double log_y) { return conditional_gap(dep, inv_x, log_y, v); };
        if (gap(-kLogYLimit) > 0.0 || gap(kLogYLimit) < 0.0)
            throw NumericError("conditional inversion is not bracketed");
        const double log_y = roots::brent(gap, -kLogYLimit, kLogYLimit, kLogYTol);
        xs[static_cast<std::size_t>(i)] = x;
        ys[static_cast<std::size_t>(i)] = std::exp(log_y);
    }
    return {std::move(xs), std::move(ys)};
}

LossPairSample sample_bivariate_t(double nu, double rho, int n, std::uint64_t seed) {
    if (!(nu > 0.0) || !(rho > -1.0 && rho < 1.0))
        throw DomainError("sample_bivariate_t: need nu > 0 and rho in (-1,1)");
    if (n < 2) throw DomainError("sample_bivariate_t: need n >= 2");
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi2(nu);
    const double c = std::sqrt(1.0 - rho * rho);
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double z1 = normal(rng);
        const double z2 = rho * z1 + c * normal(rng);
        const double scale = std::sqrt(nu / chi2(rng));
        xs[static_cast<std::size_t>(i)] = z1 * scale;
        ys[static_cast<std::size_t>(i)] = z2 * scale;
    }
    return {std::move(xs), std::move(ys)};
}

LossPairSample sample(const GenerativeModel& model, int n, std::uint64_t seed) {
    if (model.margins() == Margins::StudentT)
        return sample_bivariate_t(model.dependence().param(0), model.dependence().param(1), n, seed);
    return sample_bivariate_evd(model, n, seed);
}

StudySetting reference_setting(Family family) {
    switch (family) {
        case Family::Logistic:
            return {TdfModel::logistic(0.6), 2000, 180, default_test_functions(family)};
        case Family::HuslerReiss:
            return {TdfModel::husler_reiss(2.5), 2000, 280, default_test_functions(family)};
        case Family::Bilogistic:
            return {TdfModel::bilogistic(0.4, 0.7), 2000, 180, default_test_functions(family)};
        case Family::AsymLogistic:
            return {TdfModel::asym_logistic(0.6, 0.5, 0.8), 2500, 180, default_test_functions(family)};
        case Family::StudentT:
            return {TdfModel::student_t(5.0, 0.6), 3000, 100, default_test_functions(family)};
    }
    throw DomainError("unknown family");
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::Full: return "full";
        case Variant::TrueGamma: return "true_gamma";
        case Variant::TrueEtaStar: return "true_eta_star";
        case Variant::TrueEta: return "true_eta";
    }
    return "?";
}

McStudyConfig McStudyConfig::reference(Family family) {
    const auto s = reference_setting(family);
    McStudyConfig c(GenerativeModel(s.model));
    c.n = s.n;
    c.m = s.m;
    c.g = s.g;
    return c;
}

McSummary mc_study(const McStudyConfig& config) {
    if (config.reps < 1) throw DomainError("mc_study: reps must be >= 1");
    const RiskLevel levels = RiskLevel::single(config.p);
    McSummary out;
    out.true_covar = true_covar_oracle(config.model, levels);
    out.true_gamma = config.model.tail_index();
    out.true_eta_star = solve_eta_star(config.model.dependence(), levels);
    out.true_eta = exact_eta_p(config.model, levels);

    const Family family = config.model.family();
    const auto g = config.g.size() > 0 ? config.g : default_test_functions(family);
    out.replications.resize(static_cast<std::size_t>(config.reps));

    parallel_for(out.replications.size(), config.threads, [&](std::size_t i) {
        auto& rep = out.replications[i];
        rep.index = static_cast<int>(i);
        rep.estimates.assign(config.variants.size(), std::numeric_limits<double>::quiet_NaN());
        try {
            const auto data = sample(config.model, config.n, stream_seed(config.master_seed, 2 * i));
            CovarConfig cc;
            cc.m = config.m;
            cc.g = g;
            cc.fit = config.fit;
            cc.fit.seed = stream_seed(config.master_seed, 2 * i + 1);
            cc.bootstrap = config.bootstrap;
            cc.bootstrap.seed = stream_seed(cc.fit.seed, 1);
            cc.bootstrap.threads = 1;
            if (config.k) cc.k1 = *config.k;
            const auto est = estimate_covar(data, family, levels, cc);
            rep.theta_hat = est.tdf_fit->theta_hat;
            rep.gamma_hat = est.gamma_hat;
            rep.eta_star_hat = est.eta_star_hat;
            rep.var_hat = est.var_component;
            rep.k = est.k2;
            for (std::size_t v = 0; v < config.variants.size(); ++v) {
                double gamma = est.gamma_hat, eta = est.eta_star_hat;
                switch (config.variants[v]) {
                    case Variant::Full: break;
                    case Variant::TrueGamma: gamma = out.true_gamma; break;
                    case Variant::TrueEtaStar: eta = out.true_eta_star; break;
                    case Variant::TrueEta: eta = out.true_eta; break;
                }
                rep.estimates[v] = compose_covar(est.threshold, est.k2, est.n, config.p, gamma, eta);
            }
            rep.ok = true;
        } catch (const std::exception& e) {
            rep.error = e.what();
        }
    });

    for (std::size_t v = 0; v < config.variants.size(); ++v) {
        std::vector<double> values;
        for (const auto& rep : out.replications)
            if (rep.ok) values.push_back(rep.estimates[v]);
        VariantSummary s{config.variants[v]};
        s.count = static_cast<int>(values.size());
        if (!values.empty()) {
            s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
            double ss = 0.0;
            for (double x : values) ss += (x - s.mean) * (x - s.mean);
            s.sd = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
            std::sort(values.begin(), values.end());
            const std::size_t h = values.size() / 2;
            s.median = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
        }
        out.variants.push_back(s);
    }
    for (const auto& rep : out.replications)
        if (!rep.ok) ++out.failures;
    return out;
}

}  // namespace covar
