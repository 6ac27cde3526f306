#pragma once

#include "covar/backtest.hpp"
#include "covar/covar.hpp"
#include "covar/forecast.hpp"
#include "covar/garch.hpp"
#include "covar/simulation.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace covar::report {

using Json = nlohmann::ordered_json;
/// Resolved configuration echoed into every artifact.
using ConfigEcho = std::map<std::string, std::string>;

Json to_json(const MEstimatorFit& fit);
/// Flat record of the estimate and all its ingredients.
Json to_json(const CovarEstimate& est);
Json to_json(const GarchParams& params);
Json to_json(const CoverageResult& result);

/// Table-2 layout: one row per (model, variant, statistic) plus the true value.
void write_mc_summary_csv(const std::filesystem::path& path, const std::string& model,
                          const McSummary& summary, const ConfigEcho& echo);
/// Long format (replication, quantity, value) of gamma_hat, eta_star_hat,
/// var_hat and each variant estimate.
void write_density_csv(const std::filesystem::path& path, const McSummary& summary,
                       const std::vector<Variant>& variants, const ConfigEcho& echo);

/// Columns date,var_i,covar_s_given_i,realized_x_i,realized_x_s,refit_id;
/// invalid rows carry "nan".
void write_forecast_csv(const std::filesystem::path& path, const ForecastTable& table,
                        const ConfigEcho& echo);
std::vector<ForecastRow> read_forecast_csv(const std::filesystem::path& path);
void write_refits_csv(const std::filesystem::path& path, const ForecastTable& table,
                      const ConfigEcho& echo);

/// One method's forecasts for one institution.
struct MethodForecast {
    std::string institution;
    std::string method;
    std::vector<ForecastRow> rows;
};

/// Coverage tests, average scores and traffic-light matrices per institution,
/// plus pooled matrices when several institutions are present. CoVaR scores are
/// compared on the days where both methods report a VaR violation.
Json backtest_report(const std::vector<MethodForecast>& forecasts, const RiskLevel& levels,
                     double test_level);

void write_json(const std::filesystem::path& path, const Json& json);

}  // namespace covar::report
