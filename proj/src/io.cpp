#include "covar/io.hpp"

#include "covar/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace covar::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

}  // namespace

SeriesMode parse_series_mode(const std::string& text) {
    if (text == "prices") return SeriesMode::Prices;
    if (text == "losses") return SeriesMode::Losses;
    throw DomainError("series mode must be 'prices' or 'losses', got '" + text + "'");
}

DatedSeries read_dated_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    DatedSeries out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path.string(), lineno, "expected 'date,value'");
        const std::string date = trim(line.substr(0, comma));
        const auto value = parse_number(line.substr(comma + 1));
        if (!value) {
            if (out.dates.empty() && lineno == 1) continue;  // header row
            throw ParseError(path.string(), lineno, "cannot parse value '" + line.substr(comma + 1) + "'");
        }
        if (!std::isfinite(*value)) throw ParseError(path.string(), lineno, "non-finite value");
        if (!out.dates.empty() && !(out.dates.back() < date))
            throw ParseError(path.string(), lineno, "dates must be strictly increasing");
        out.dates.push_back(date);
        out.values.push_back(*value);
    }
    return out;
}

DatedSeries prices_to_losses(const DatedSeries& prices) {
    DatedSeries out;
    for (std::size_t i = 0; i < prices.values.size(); ++i) {
        if (!(prices.values[i] > 0.0))
            throw DomainError("price on " + prices.dates[i] + " is not positive");
        if (i == 0) continue;
        out.dates.push_back(prices.dates[i]);
        out.values.push_back(-100.0 * (std::log(prices.values[i]) - std::log(prices.values[i - 1])));
    }
    return out;
}

DatedSeries ingest(const std::filesystem::path& path, SeriesMode mode) {
    auto raw = read_dated_csv(path);
    return mode == SeriesMode::Prices ? prices_to_losses(raw) : raw;
}

JoinedSeries inner_join(const DatedSeries& a, const DatedSeries& b) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < b.dates.size(); ++j) index.emplace(b.dates[j], j);
    JoinedSeries out;
    std::size_t matched = 0;
    for (std::size_t i = 0; i < a.dates.size(); ++i) {
        const auto it = index.find(a.dates[i]);
        if (it == index.end()) {
            ++out.dropped_first;
            continue;
        }
        out.dates.push_back(a.dates[i]);
        out.first.push_back(a.values[i]);
        out.second.push_back(b.values[it->second]);
        ++matched;
    }
    out.dropped_second = static_cast<int>(b.dates.size() - matched);
    return out;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open config file");
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(path.string(), lineno, "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(path.string(), lineno, "empty key");
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const auto d = parse_number(*v);
    if (!d) throw DomainError("config key '" + key + "' is not a number: '" + *v + "'");
    return *d;
}

int Config::get_int(const std::string& key, int fallback) const {
    return get_optional_int(key).value_or(fallback);
}

std::optional<int> Config::get_optional_int(const std::string& key) const {
    const auto v = get(key);
    if (!v || *v == "auto") return std::nullopt;
    int out = 0;
    const std::string t = trim(*v);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw DomainError("config key '" + key + "' is not an integer: '" + *v + "'");
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace covar::io
