#include "covar/forecast.hpp"

#include "covar/errors.hpp"
#include "covar/parallel.hpp"
#include "covar/rng.hpp"

#include <cmath>
#include <limits>

namespace covar {

namespace {

struct Filtered {
    double mu = 0.0;
    double sigma = 1.0;
};

Filtered one_step(const ForecastConfig& config, const GarchParams& p, std::span<const double> window) {
    if (config.filter == FilterMode::Identity) return {};
    const auto path = garch_filter(p, window);
    return {path.next_mean, path.next_vol};
}

// Residual VaR of the institution at p1 with the same k rules as the CoVaR step.
double residual_var(std::span<const double> zi, const ForecastConfig& config, std::uint64_t seed) {
    int k1 = 0;
    if (config.covar.k1) {
        k1 = *config.covar.k1;
    } else {
        auto boot = config.covar.bootstrap;
        boot.seed = seed;
        k1 = select_k_bootstrap(zi, boot).k;
    }
    const int k2 = config.covar.k2 ? *config.covar.k2 : k1;
    return weissman_quantile(zi, k2, hill(zi, k1), config.levels.p1);
}

void run_refit(RefitRecord& rec, std::span<const double> xs, std::span<const double> ys,
               const ForecastConfig& config) {
    const auto w = static_cast<std::size_t>(config.window);
    const auto xw = xs.subspan(static_cast<std::size_t>(rec.start), w);
    const auto yw = ys.subspan(static_cast<std::size_t>(rec.start), w);
    const std::uint64_t seed = stream_seed(config.seed, static_cast<std::uint64_t>(rec.start));

    std::vector<double> zi(xw.begin(), xw.end()), zs(yw.begin(), yw.end());
    if (config.filter == FilterMode::ArGarch) {
        auto opts = config.garch;
        opts.seed = stream_seed(seed, 1);
        const auto fit_i = fit_ar_garch(xw, opts);
        opts.seed = stream_seed(seed, 2);
        const auto fit_s = fit_ar_garch(yw, opts);
        rec.params_i = fit_i.params;
        rec.params_s = fit_s.params;
        zi = realized_residuals(xw, fit_i);
        zs = realized_residuals(yw, fit_s);
    }
    rec.static_var_i = residual_var(zi, config, stream_seed(seed, 3));
    auto cc = config.covar;
    cc.fit.seed = stream_seed(seed, 4);
    cc.bootstrap.seed = stream_seed(seed, 5);
    rec.estimate = estimate_covar(LossPairSample(std::move(zi), std::move(zs)), config.family,
                                  config.levels, cc);
    rec.static_covar = rec.estimate.value;
    rec.ok = true;
}

}  // namespace

ForecastTable rolling_forecast(std::span<const double> xs, std::span<const double> ys,
                               std::span<const std::string> dates, const ForecastConfig& config) {
    if (xs.size() != ys.size() || (!dates.empty() && dates.size() != xs.size()))
        throw DomainError("rolling_forecast: series lengths differ");
    if (config.window < 2 || xs.size() <= static_cast<std::size_t>(config.window))
        throw DomainError("rolling_forecast: series must be longer than the window");
    if (config.refit_stride < 1) throw DomainError("rolling_forecast: refit stride must be >= 1");
    config.levels.validate();

    const int total = static_cast<int>(xs.size());
    ForecastTable table;
    for (int t = config.window, id = 0; t < total; t += config.refit_stride, ++id) {
        RefitRecord rec;
        rec.id = id;
        rec.start = t - config.window;
        table.refits.push_back(rec);
    }
    parallel_for(table.refits.size(), config.threads, [&](std::size_t r) {
        auto& rec = table.refits[r];
        try {
            run_refit(rec, xs, ys, config);
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    });

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto w = static_cast<std::size_t>(config.window);
    for (int t = config.window; t < total; ++t) {
        const auto& rec = table.refits[static_cast<std::size_t>((t - config.window) / config.refit_stride)];
        ForecastRow row;
        row.t = t;
        row.date = dates.empty() ? std::to_string(t) : dates[static_cast<std::size_t>(t)];
        row.refit_id = rec.id;
        row.realized_x_i = xs[static_cast<std::size_t>(t)];
        row.realized_x_s = ys[static_cast<std::size_t>(t)];
        row.var_i = row.covar_s_given_i = nan;
        if (rec.ok) {
            const auto start = static_cast<std::size_t>(t) - w;
            const auto fi = one_step(config, rec.params_i, xs.subspan(start, w));
            const auto fs = one_step(config, rec.params_s, ys.subspan(start, w));
            row.mu_i = fi.mu;
            row.sigma_i = fi.sigma;
            row.mu_s = fs.mu;
            row.sigma_s = fs.sigma;
            row.var_i = fi.mu + fi.sigma * rec.static_var_i;
            row.covar_s_given_i = fs.mu + fs.sigma * rec.static_covar;
            row.valid = std::isfinite(row.var_i) && std::isfinite(row.covar_s_given_i);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace covar
