#pragma once

#include "covar/covar.hpp"
#include "covar/garch.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace covar {

enum class FilterMode {
    ArGarch,   ///< marginal AR(1)-GARCH(1,1) filters
    Identity,  ///< mu = 0, sigma = 1: static estimates on the raw losses
};

struct ForecastConfig {
    int window = 3000;
    int refit_stride = 50;
    RiskLevel levels{0.02, 0.05};
    Family family = Family::Logistic;
    CovarConfig covar{};
    FilterMode filter = FilterMode::ArGarch;
    GarchOptions garch{};
    std::uint64_t seed = 1;
    int threads = 0;
};

/// Estimates refreshed at one refit point, from the window [start, start + window).
struct RefitRecord {
    int id = 0;
    int start = 0;
    bool ok = false;
    std::string error;
    GarchParams params_i;
    GarchParams params_s;
    double static_var_i = 0.0;  ///< residual VaR of the institution at p1
    double static_covar = 0.0;  ///< residual CoVaR of the system
    CovarEstimate estimate;
};

/// Forecast for day t from data strictly before t.
struct ForecastRow {
    std::string date;
    int t = 0;
    bool valid = false;
    int refit_id = 0;
    double mu_i = 0.0, sigma_i = 1.0, mu_s = 0.0, sigma_s = 1.0;
    double var_i = 0.0;
    double covar_s_given_i = 0.0;
    double realized_x_i = 0.0;
    double realized_x_s = 0.0;
};

struct ForecastTable {
    std::vector<ForecastRow> rows;
    std::vector<RefitRecord> refits;
};

/// Rolling one-step-ahead VaR of the institution and CoVaR of the system.
/// Every refit_stride days the marginal filters are refitted on the trailing
/// window and the static residual estimates refreshed; every day the filters
/// are rerun on the trailing window with the latest parameters to give
/// mu_t and sigma_t, and
///   VaR_t = mu_t^i + sigma_t^i VaR_Z^i(p1),  CoVaR_t = mu_t^s + sigma_t^s CoVaR_Z.
/// Refit seeds depend only on the window start, so stride changes leave the
/// forecasts on shared refit days unchanged. A failed refit invalidates its rows.
ForecastTable rolling_forecast(std::span<const double> xs, std::span<const double> ys,
                               std::span<const std::string> dates, const ForecastConfig& config);

}  // namespace covar
