#include "covar/report.hpp"

#include "covar/errors.hpp"
#include "covar/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace covar::report {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_echo(std::ostream& out, const ConfigEcho& echo) {
    for (const auto& [k, v] : echo) out << "# " << k << '=' << v << '\n';
}

std::string num(double v) { return std::isfinite(v) ? io::format_double(v) : "nan"; }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Json to_json(const MEstimatorFit& fit) {
    Json j;
    j["family"] = std::string(to_string(fit.family));
    j["parameter_names"] = parameter_names(fit.family);
    j["theta_hat"] = to_vector(fit.theta_hat);
    j["objective_value"] = fit.objective_value;
    j["m"] = fit.m;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["boundary"] = fit.boundary;
    return j;
}

Json to_json(const CovarEstimate& est) {
    Json j;
    j["value"] = est.value;
    j["eta_star_hat"] = est.eta_star_hat;
    j["gamma_hat"] = est.gamma_hat;
    j["var_component"] = est.var_component;
    j["threshold"] = est.threshold;
    j["k1"] = est.k1;
    j["k2"] = est.k2;
    j["m"] = est.m;
    j["n"] = est.n;
    j["p1"] = est.levels.p1;
    j["p2"] = est.levels.p2;
    if (est.tdf_fit) {
        j["family"] = std::string(to_string(est.tdf_fit->family));
        j["theta_hat"] = to_vector(est.tdf_fit->theta_hat);
        j["tdf_objective"] = est.tdf_fit->objective_value;
        j["tdf_boundary"] = est.tdf_fit->boundary;
    }
    if (est.k_selection) {
        j["k_bootstrap_n1"] = est.k_selection->n1;
        j["k_bootstrap_n2"] = est.k_selection->n2;
        j["k_bootstrap_fallback"] = est.k_selection->fallback;
    }
    return j;
}

Json to_json(const GarchParams& p) {
    return Json{{"alpha0", p.alpha0}, {"alpha1", p.alpha1}, {"beta0", p.beta0}, {"beta1", p.beta1},
                {"beta2", p.beta2},   {"nu", p.nu},         {"xi", p.xi}};
}

Json to_json(const CoverageResult& r) {
    return Json{{"observed", r.observed},   {"trials", r.trials},     {"expected", r.expected},
                {"statistic", r.statistic}, {"p_value", r.p_value}};
}

void write_mc_summary_csv(const std::filesystem::path& path, const std::string& model,
                          const McSummary& s, const ConfigEcho& echo) {
    auto out = open_out(path);
    write_echo(out, echo);
    out << "model,variant,statistic,value\n";
    out << model << ",truth,covar," << num(s.true_covar) << '\n';
    out << model << ",truth,gamma," << num(s.true_gamma) << '\n';
    out << model << ",truth,eta_star," << num(s.true_eta_star) << '\n';
    out << model << ",truth,eta," << num(s.true_eta) << '\n';
    for (const auto& v : s.variants) {
        const std::string prefix = model + "," + std::string(to_string(v.variant)) + ",";
        out << prefix << "mean," << num(v.mean) << '\n';
        out << prefix << "median," << num(v.median) << '\n';
        out << prefix << "sd," << num(v.sd) << '\n';
        out << prefix << "count," << v.count << '\n';
    }
    out << model << ",all,failures," << s.failures << '\n';
}

void write_density_csv(const std::filesystem::path& path, const McSummary& s,
                       const std::vector<Variant>& variants, const ConfigEcho& echo) {
    auto out = open_out(path);
    write_echo(out, echo);
    out << "replication,quantity,value\n";
    for (const auto& rep : s.replications) {
        if (!rep.ok) continue;
        out << rep.index << ",gamma_hat," << num(rep.gamma_hat) << '\n';
        out << rep.index << ",eta_star_hat," << num(rep.eta_star_hat) << '\n';
        out << rep.index << ",var_hat," << num(rep.var_hat) << '\n';
        out << rep.index << ",k," << rep.k << '\n';
        for (std::size_t v = 0; v < variants.size(); ++v)
            out << rep.index << ",covar_" << to_string(variants[v]) << ',' << num(rep.estimates[v]) << '\n';
    }
}

void write_forecast_csv(const std::filesystem::path& path, const ForecastTable& table,
                        const ConfigEcho& echo) {
    auto out = open_out(path);
    write_echo(out, echo);
    out << "date,var_i,covar_s_given_i,realized_x_i,realized_x_s,refit_id\n";
    for (const auto& r : table.rows) {
        out << r.date << ',' << (r.valid ? num(r.var_i) : "nan") << ','
            << (r.valid ? num(r.covar_s_given_i) : "nan") << ',' << num(r.realized_x_i) << ','
            << num(r.realized_x_s) << ',' << r.refit_id << '\n';
    }
}

std::vector<ForecastRow> read_forecast_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io::ParseError(path.string(), 0, "cannot open forecast file");
    std::vector<ForecastRow> rows;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line.rfind("date,var_i,covar_s_given_i", 0) != 0)
                throw io::ParseError(path.string(), lineno, "unexpected forecast header");
            header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw io::ParseError(path.string(), lineno, "expected 6 columns");
        ForecastRow r;
        try {
            r.date = cells[0];
            r.var_i = std::stod(cells[1]);
            r.covar_s_given_i = std::stod(cells[2]);
            r.realized_x_i = std::stod(cells[3]);
            r.realized_x_s = std::stod(cells[4]);
            r.refit_id = std::stoi(cells[5]);
        } catch (const std::exception&) {
            throw io::ParseError(path.string(), lineno, "cannot parse forecast row");
        }
        r.t = static_cast<int>(rows.size());
        r.valid = std::isfinite(r.var_i) && std::isfinite(r.covar_s_given_i);
        rows.push_back(r);
    }
    return rows;
}

void write_refits_csv(const std::filesystem::path& path, const ForecastTable& table,
                      const ConfigEcho& echo) {
    auto out = open_out(path);
    write_echo(out, echo);
    out << "refit_id,start,ok,static_var_i,static_covar,eta_star_hat,gamma_hat,k1,k2,error\n";
    for (const auto& r : table.refits) {
        out << r.id << ',' << r.start << ',' << (r.ok ? 1 : 0) << ',' << num(r.ok ? r.static_var_i : NAN)
            << ',' << num(r.ok ? r.static_covar : NAN) << ',' << num(r.ok ? r.estimate.eta_star_hat : NAN)
            << ',' << num(r.ok ? r.estimate.gamma_hat : NAN) << ',' << r.estimate.k1 << ','
            << r.estimate.k2 << ",\"" << r.error << "\"\n";
    }
}

namespace {

// Evaluation material for one method on one institution.
struct MethodEval {
    std::string method;
    std::map<std::string, const ForecastRow*> by_date;
};

// CoVaR scores of a and b on the days where both report a VaR violation.
ScorePair aligned_covar_scores(const MethodEval& a, const MethodEval& b, double p2) {
    ScorePair pair;
    pair.reference.method = a.method;
    pair.competitor.method = b.method;
    for (const auto& [date, ra] : a.by_date) {
        const auto it = b.by_date.find(date);
        if (it == b.by_date.end()) continue;
        const ForecastRow* rb = it->second;
        if (!(ra->realized_x_i > ra->var_i && rb->realized_x_i > rb->var_i)) continue;
        pair.reference.scores.push_back(quantile_score(ra->covar_s_given_i, ra->realized_x_s, p2));
        pair.competitor.scores.push_back(quantile_score(rb->covar_s_given_i, rb->realized_x_s, p2));
    }
    return pair;
}

Json traffic_light(const std::vector<std::string>& methods,
                   const std::function<ScorePair(std::size_t, std::size_t)>& pairs, double level) {
    Json cells = Json::array();
    for (std::size_t a = 0; a < methods.size(); ++a) {
        Json row = Json::array();
        for (std::size_t b = 0; b < methods.size(); ++b) {
            if (a == b) {
                row.push_back(Json{{"decision", "self"}});
                continue;
            }
            const auto pair = pairs(a, b);
            const auto res = comparative_backtest(pair.reference, pair.competitor, level);
            Json cell{{"decision", std::string(to_string(res.decision))},
                      {"statistic", res.statistic},
                      {"mean_difference", res.mean_difference},
                      {"days", res.days}};
            if (!res.warning.empty()) cell["warning"] = res.warning;
            row.push_back(cell);
        }
        cells.push_back(row);
    }
    return Json{{"reference_rows", methods}, {"competitor_columns", methods}, {"cells", cells}};
}

}  // namespace

Json backtest_report(const std::vector<MethodForecast>& forecasts, const RiskLevel& levels,
                     double test_level) {
    levels.validate();
    std::vector<std::string> institutions, methods;
    std::map<std::string, std::map<std::string, MethodEval>> evals;
    for (const auto& f : forecasts) {
        if (std::find(institutions.begin(), institutions.end(), f.institution) == institutions.end())
            institutions.push_back(f.institution);
        if (std::find(methods.begin(), methods.end(), f.method) == methods.end())
            methods.push_back(f.method);
        auto& e = evals[f.institution][f.method];
        if (!e.by_date.empty()) throw DomainError("duplicate forecast for " + f.institution + "/" + f.method);
        e.method = f.method;
        for (const auto& r : f.rows)
            if (r.valid) e.by_date[r.date] = &r;
    }

    Json report;
    report["p1"] = levels.p1;
    report["p2"] = levels.p2;
    report["test_level"] = test_level;
    Json inst_json = Json::array();
    for (const auto& inst : institutions) {
        Json ij;
        ij["institution"] = inst;
        Json mj = Json::array();
        std::vector<std::string> present;
        for (const auto& method : methods) {
            const auto it = evals[inst].find(method);
            if (it == evals[inst].end()) continue;
            present.push_back(method);
            const auto& e = it->second;
            int days = 0, var_exceed = 0, joint = 0;
            double var_score = 0.0, covar_score = 0.0;
            for (const auto& [date, r] : e.by_date) {
                ++days;
                var_score += quantile_score(r->var_i, r->realized_x_i, levels.p1);
                if (r->realized_x_i > r->var_i) {
                    ++var_exceed;
                    covar_score += quantile_score(r->covar_s_given_i, r->realized_x_s, levels.p2);
                    if (r->realized_x_s > r->covar_s_given_i) ++joint;
                }
            }
            Json m{{"method", method}, {"days", days}};
            m["var_coverage"] = days > 0 ? to_json(uc_test_var(var_exceed, days, levels.p1)) : Json(nullptr);
            m["covar_coverage"] = var_exceed > 0 ? to_json(uc_test_covar(joint, var_exceed, levels.p2)) : Json(nullptr);
            m["mean_var_score"] = days > 0 ? number_or_null(var_score / days) : Json(nullptr);
            m["mean_covar_score"] = var_exceed > 0 ? number_or_null(covar_score / var_exceed) : Json(nullptr);
            mj.push_back(m);
        }
        ij["methods"] = mj;
        if (present.size() >= 2) {
            ij["traffic_light"] = traffic_light(present, [&](std::size_t a, std::size_t b) {
                return aligned_covar_scores(evals[inst][present[a]], evals[inst][present[b]], levels.p2);
            }, test_level);
        }
        inst_json.push_back(ij);
    }
    report["institutions"] = inst_json;

    if (institutions.size() >= 2 && methods.size() >= 2) {
        report["pooled_traffic_light"] = traffic_light(methods, [&](std::size_t a, std::size_t b) {
            std::vector<ScorePair> pairs;
            for (const auto& inst : institutions) {
                auto& ev = evals[inst];
                if (!ev.count(methods[a]) || !ev.count(methods[b])) continue;
                auto pair = aligned_covar_scores(ev[methods[a]], ev[methods[b]], levels.p2);
                if (!pair.reference.scores.empty() && pair.reference.mean() > 0.0) pairs.push_back(std::move(pair));
            }
            if (pairs.empty()) return ScorePair{};
            return pool_normalized_scores(pairs);
        }, test_level);
    }
    return report;
}

void write_json(const std::filesystem::path& path, const Json& json) {
    auto out = open_out(path);
    out << json.dump(2) << '\n';
}

}  // namespace covar::report
