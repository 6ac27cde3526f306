// covar-evt: command-line front end for the CoVaR estimation library.

#include "covar/backtest.hpp"
#include "covar/covar.hpp"
#include "covar/errors.hpp"
#include "covar/forecast.hpp"
#include "covar/io.hpp"
#include "covar/m_estimator.hpp"
#include "covar/report.hpp"
#include "covar/simulation.hpp"
#include "covar/tdf.hpp"
#include "covar/univariate_tail.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace covar;
using report::Json;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out = ".";
    std::vector<std::string> sets;
};

// Files written by the current command; removed again if the command fails.
std::vector<fs::path> g_written;

fs::path output(const io::Config& cfg, const std::string& name) {
    const fs::path dir = cfg.get_or("out", ".");
    fs::create_directories(dir);
    g_written.push_back(dir / name);
    return dir / name;
}

io::Config resolve(const Common& c) {
    io::Config cfg;
    if (!c.config_path.empty()) cfg = io::Config::load(c.config_path);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed) cfg.set("seed", std::to_string(*c.seed));
    if (!cfg.has("seed")) cfg.set("seed", "20240501");
    if (c.threads) cfg.set("threads", std::to_string(*c.threads));
    if (!c.out.empty() && (c.out != "." || !cfg.has("out"))) cfg.set("out", c.out);
    return cfg;
}

std::uint64_t seed_of(const io::Config& cfg) {
    return static_cast<std::uint64_t>(std::stoull(*cfg.get("seed")));
}

Eigen::VectorXd parse_vector(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string join(const Eigen::VectorXd& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v(i));
    return s;
}

TdfModel model_from(const io::Config& cfg, Family family) {
    if (const auto p = cfg.get("params")) return {family, parse_vector(*p)};
    return reference_setting(family).model;
}

RiskLevel levels_from(const io::Config& cfg) {
    const double p = cfg.get_double("p", 0.05);
    RiskLevel lv{cfg.get_double("p1", p), cfg.get_double("p2", p)};
    lv.validate();
    return lv;
}

BootstrapConfig bootstrap_from(const io::Config& cfg) {
    BootstrapConfig b;
    b.subsample_exponent = cfg.get_double("bootstrap_exponent", b.subsample_exponent);
    b.resamples = cfg.get_int("bootstrap_resamples", b.resamples);
    b.seed = stream_seed(seed_of(cfg), 11);
    b.threads = cfg.get_int("threads", 0);
    return b;
}

CovarConfig covar_config_from(const io::Config& cfg, Family family) {
    CovarConfig c;
    c.m = cfg.get_int("m", 0);
    if (c.m <= 0) throw DomainError("config key 'm' (tail sample fraction) is required");
    c.k1 = cfg.get_optional_int("k1");
    c.k2 = cfg.get_optional_int("k2");
    c.g = cfg.has("g") ? TestFunctionSet::parse(*cfg.get("g")) : default_test_functions(family);
    c.fit.seed = stream_seed(seed_of(cfg), 12);
    c.fit.random_restarts = cfg.get_int("restarts", c.fit.random_restarts);
    c.bootstrap = bootstrap_from(cfg);
    return c;
}

io::JoinedSeries load_pair(const io::Config& cfg) {
    const auto x = cfg.get("x");
    const auto y = cfg.get("y");
    if (!x || !y) throw DomainError("config keys 'x' and 'y' (input CSV files) are required");
    for (const auto& f : {*x, *y})
        if (!fs::exists(f)) throw DomainError("input file not found: " + f);
    const auto mode = io::parse_series_mode(cfg.get_or("mode", "prices"));
    auto joined = io::inner_join(io::ingest(*x, mode), io::ingest(*y, mode));
    if (joined.dropped_first + joined.dropped_second > 0)
        std::cerr << "inner join dropped " << joined.dropped_first << " rows of x and "
                  << joined.dropped_second << " rows of y\n";
    return joined;
}

void check_k_against_n(const CovarConfig& c, std::size_t n) {
    for (const auto& [name, k] : {std::pair{"k1", c.k1}, std::pair{"k2", c.k2}})
        if (k && (*k < 1 || static_cast<std::size_t>(*k) >= n))
            throw DomainError(std::string(name) + " = " + std::to_string(*k) +
                              " must lie in [1, n) with n = " + std::to_string(n));
    if (static_cast<std::size_t>(c.m) > n)
        throw DomainError("m = " + std::to_string(c.m) + " exceeds n = " + std::to_string(n));
}

int run_simulate(const io::Config& in) {
    io::Config cfg = in;
    const Family family = parse_family(cfg.get_or("family", "logistic"));
    auto mc = McStudyConfig::reference(family);
    mc.model = GenerativeModel(model_from(cfg, family));
    mc.n = cfg.get_int("n", mc.n);
    mc.reps = cfg.get_int("reps", mc.reps);
    mc.p = cfg.get_double("p", mc.p);
    mc.m = cfg.get_int("m", mc.m);
    if (cfg.has("g")) mc.g = TestFunctionSet::parse(*cfg.get("g"));
    mc.master_seed = seed_of(cfg);
    mc.threads = cfg.get_int("threads", 0);
    mc.bootstrap = bootstrap_from(cfg);
    mc.k = cfg.get_optional_int("k");
    cfg.set("family", std::string(to_string(family)));
    cfg.set("params", join(mc.model.dependence().params()));
    cfg.set("n", std::to_string(mc.n));
    cfg.set("reps", std::to_string(mc.reps));
    cfg.set("p", io::format_double(mc.p));
    cfg.set("m", std::to_string(mc.m));
    cfg.set("g", mc.g.to_string());
    cfg.set("seed", std::to_string(mc.master_seed));

    const auto summary = mc_study(mc);
    report::write_mc_summary_csv(output(cfg, "summary.csv"), std::string(to_string(family)), summary,
                                 cfg.values());
    report::write_density_csv(output(cfg, "density.csv"), summary, mc.variants, cfg.values());

    std::cout << to_string(family) << "  true CoVaR " << summary.true_covar << "  failures "
              << summary.failures << '\n';
    for (const auto& v : summary.variants)
        std::cout << "  " << to_string(v.variant) << ": mean " << v.mean << "  median " << v.median
                  << "  sd " << v.sd << "  (" << v.count << " reps)\n";
    return 0;
}

int run_fit(const io::Config& cfg) {
    const Family family = parse_family(cfg.get_or("family", "logistic"));
    const auto data = load_pair(cfg);
    const auto c = covar_config_from(cfg, family);
    check_k_against_n(c, data.first.size());
    const LossPairSample sample(data.first, data.second);
    const auto fit = fit_tdf(sample, c.m, family, *c.g, c.fit);
    Json j{{"config", cfg.values()}, {"n", sample.size()}, {"tdc_hat", tdc_hat(sample, c.m)}};
    j["fit"] = report::to_json(fit);
    report::write_json(output(cfg, "fit.json"), j);
    std::cout << to_string(family) << " theta_hat = (" << join(fit.theta_hat) << ")  objective "
              << fit.objective_value << (fit.boundary ? "  [boundary]" : "") << '\n';
    return 0;
}

int run_estimate(const io::Config& cfg) {
    const Family family = parse_family(cfg.get_or("family", "logistic"));
    const auto data = load_pair(cfg);
    const auto c = covar_config_from(cfg, family);
    check_k_against_n(c, data.first.size());
    const auto levels = levels_from(cfg);
    const LossPairSample sample(data.first, data.second);
    const auto est = estimate_covar(sample, family, levels, c);
    Json j{{"config", cfg.values()}};
    j["estimate"] = report::to_json(est);
    report::write_json(output(cfg, "estimate.json"), j);
    std::cout << "CoVaR " << est.value << "  (VaR_Y " << est.var_component << ", eta* "
              << est.eta_star_hat << ", gamma " << est.gamma_hat << ", k1 " << est.k1 << ", k2 "
              << est.k2 << ")\n";
    return 0;
}

int run_forecast(const io::Config& cfg) {
    const Family family = parse_family(cfg.get_or("family", "logistic"));
    const auto data = load_pair(cfg);
    ForecastConfig fc;
    fc.family = family;
    fc.levels = levels_from(cfg);
    fc.covar = covar_config_from(cfg, family);
    fc.window = cfg.get_int("window", fc.window);
    fc.refit_stride = cfg.get_int("refit_stride", fc.refit_stride);
    check_k_against_n(fc.covar, static_cast<std::size_t>(fc.window));
    const std::string filter = cfg.get_or("filter", "garch");
    if (filter == "identity") fc.filter = FilterMode::Identity;
    else if (filter != "garch") throw DomainError("filter must be 'garch' or 'identity'");
    fc.seed = seed_of(cfg);
    fc.threads = cfg.get_int("threads", 0);
    fc.covar.bootstrap.threads = 1;
    const auto table = rolling_forecast(data.first, data.second, data.dates, fc);
    report::write_forecast_csv(output(cfg, "forecast.csv"), table, cfg.values());
    report::write_refits_csv(output(cfg, "refits.csv"), table, cfg.values());
    int valid = 0, failed = 0;
    for (const auto& r : table.rows) valid += r.valid;
    for (const auto& r : table.refits) failed += !r.ok;
    std::cout << table.rows.size() << " forecast days, " << valid << " valid; " << table.refits.size()
              << " refits, " << failed << " failed\n";
    return 0;
}

// Forecast inputs as "INSTITUTION:METHOD=path" entries separated by ';'.
std::vector<report::MethodForecast> load_forecasts(const std::string& spec) {
    std::vector<report::MethodForecast> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        const auto eq = item.find('=');
        if (colon == std::string::npos || eq == std::string::npos || eq < colon)
            throw DomainError("forecast entries must look like INSTITUTION:METHOD=path, got '" + item + "'");
        const std::string path = item.substr(eq + 1);
        if (!fs::exists(path)) throw DomainError("forecast file not found: " + path);
        out.push_back({item.substr(0, colon), item.substr(colon + 1, eq - colon - 1),
                       report::read_forecast_csv(path)});
    }
    if (out.empty()) throw DomainError("config key 'forecasts' lists no forecast files");
    return out;
}

int run_backtest(const io::Config& cfg) {
    const auto spec = cfg.get("forecasts");
    if (!spec) throw DomainError("config key 'forecasts' is required");
    const auto forecasts = load_forecasts(*spec);
    auto j = report::backtest_report(forecasts, levels_from(cfg), cfg.get_double("test_level", 0.10));
    j["config"] = cfg.values();
    report::write_json(output(cfg, "backtest.json"), j);
    for (const auto& inst : j["institutions"]) {
        for (const auto& m : inst["methods"]) {
            std::cout << inst["institution"].get<std::string>() << " / " << m["method"].get<std::string>();
            if (!m["var_coverage"].is_null())
                std::cout << "  VaR E=" << m["var_coverage"]["observed"] << " e="
                          << m["var_coverage"]["expected"] << " p=" << m["var_coverage"]["p_value"];
            if (!m["covar_coverage"].is_null())
                std::cout << "  CoVaR E=" << m["covar_coverage"]["observed"] << " e="
                          << m["covar_coverage"]["expected"] << " p=" << m["covar_coverage"]["p_value"];
            std::cout << '\n';
        }
    }
    return 0;
}

int run_curves(const io::Config& in) {
    io::Config cfg = in;
    const Family family = parse_family(cfg.get_or("family", "logistic"));
    const auto model = model_from(cfg, family);
    cfg.set("family", std::string(to_string(family)));
    cfg.set("params", join(model.params()));
    const int points = cfg.get_int("grid_points", 101);
    if (points < 2) throw DomainError("grid_points must be >= 2");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (points - 1);
    const auto curve = r_one_eta_curve(model, grid);
    {
        std::ofstream out(output(cfg, "r_curve.csv"));
        for (const auto& [k, v] : cfg.values()) out << "# " << k << '=' << v << '\n';
        out << "eta,r\n";
        for (const auto& p : curve) out << io::format_double(p.eta) << ',' << io::format_double(p.r) << '\n';
    }
    std::cout << "wrote " << curve.size() << " points of R(1, eta)\n";

    if (const auto y = cfg.get("y")) {
        const auto mode = io::parse_series_mode(cfg.get_or("mode", "prices"));
        const auto series = io::ingest(*y, mode).values;
        const int n = static_cast<int>(series.size());
        const int k_lo = cfg.get_int("k_lo", 10);
        const int k_hi = cfg.get_int("k_hi", std::min(n - 1, n / 5));
        const double p = cfg.get_double("p", 0.05);
        const auto hill_pts = hill_curve(series, k_lo, k_hi);
        const int k1 = cfg.get_optional_int("k1").value_or((k_lo + k_hi) / 2);
        const double gamma = cfg.get_double("gamma", hill(series, k1));
        const auto sens = var_sensitivity(series, gamma, p, k_lo, k_hi);
        std::ofstream hout(output(cfg, "hill.csv"));
        for (const auto& [k, v] : cfg.values()) hout << "# " << k << '=' << v << '\n';
        hout << "k,estimate\n";
        for (const auto& h : hill_pts) hout << h.k << ',' << io::format_double(h.gamma_hat) << '\n';
        std::ofstream sout(output(cfg, "var_sensitivity.csv"));
        for (const auto& [k, v] : cfg.values()) sout << "# " << k << '=' << v << '\n';
        sout << "# gamma=" << io::format_double(gamma) << "\nk,estimate\n";
        for (const auto& s : sens) sout << s.k2 << ',' << io::format_double(s.var_hat) << '\n';
        std::cout << "wrote Hill and VaR sensitivity curves over k in [" << k_lo << ", " << k_hi << "]\n";
    }
    return 0;
}

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
    if (dynamic_cast<const NoSolutionError*>(&e)) return "no_solution";
    if (dynamic_cast<const BracketExceededError*>(&e)) return "bracket_exceeded";
    if (dynamic_cast<const NumericError*>(&e)) return "numeric_error";
    if (dynamic_cast<const FitError*>(&e)) return "fit_error";
    if (dynamic_cast<const io::ParseError*>(&e)) return "parse_error";
    return "error";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extreme-value CoVaR estimation, simulation, forecasting and backtesting"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "key=value configuration file");
        sub->add_option("--seed", common.seed, "master random seed");
        sub->add_option("--threads", common.threads, "worker threads (0 = all cores)");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--set", common.sets, "override a configuration key (key=value)");
    };
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const io::Config&);
    };
    const Command commands[] = {
        {"simulate", "Monte Carlo study of the estimator on a known model", run_simulate},
        {"estimate", "CoVaR estimate from two loss or price series", run_estimate},
        {"fit-tdf", "Fit a tail dependence model to two series", run_fit},
        {"forecast", "Rolling GARCH-filtered VaR/CoVaR forecasts", run_forecast},
        {"backtest", "Coverage tests, scores and traffic-light comparisons", run_backtest},
        {"curves", "R(1, eta), Hill and VaR sensitivity curves", run_curves},
    };
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub);
        subs.emplace_back(sub, &c);
    }
    CLI11_PARSE(app, argc, argv);

    io::Config cfg;
    try {
        cfg = resolve(common);
        for (const auto& [sub, cmd] : subs)
            if (sub->parsed()) return cmd->run(cfg);
    } catch (const std::exception& e) {
        for (const auto& f : g_written) fs::remove(f);
        const Json err{{"error", {{"type", error_type(e)}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        try {
            const fs::path dir = cfg.get_or("out", common.out);
            fs::create_directories(dir);
            report::write_json(dir / "error.json", err);
        } catch (...) {
        }
        return 2;
    }
    return 1;
}
