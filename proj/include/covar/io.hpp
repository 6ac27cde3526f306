#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace covar::io {

/// Input or configuration error tied to a file position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

enum class SeriesMode { Prices, Losses };
SeriesMode parse_series_mode(const std::string& text);

/// Dated observations; dates are ISO-8601 strings in strictly increasing order.
struct DatedSeries {
    std::vector<std::string> dates;
    std::vector<double> values;
};

/// Reads a two-column CSV (date,value) with an optional header row.
DatedSeries read_dated_csv(const std::filesystem::path& path);

/// Percent losses -100 (log P_t - log P_{t-1}); the first date is dropped.
DatedSeries prices_to_losses(const DatedSeries& prices);

/// Reads a file and converts it to losses according to `mode`.
DatedSeries ingest(const std::filesystem::path& path, SeriesMode mode);

struct JoinedSeries {
    std::vector<std::string> dates;
    std::vector<double> first;
    std::vector<double> second;
    int dropped_first = 0;   ///< rows of the first series with no match
    int dropped_second = 0;
};

/// Inner join on dates.
JoinedSeries inner_join(const DatedSeries& a, const DatedSeries& b);

/// Flat key=value configuration; '#' starts a comment.
class Config {
public:
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::optional<int> get_optional_int(const std::string& key) const;
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Full-precision, locale-independent rendering of a double.
std::string format_double(double v);

}  // namespace covar::io
