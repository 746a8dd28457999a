#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qrob {

using FieldValue = std::variant<std::string, double, std::int64_t, bool>;

/// Flat ordered key-value record; the unit every experiment reports in.
struct ReportRow {
    std::vector<std::pair<std::string, FieldValue>> fields;

    void set(std::string key, FieldValue value);
    const FieldValue* find(const std::string& key) const;
    bool operator==(const ReportRow& other) const;
};

/// 17 significant digits, enough to round-trip a double through text.
std::string format_double(double v);
std::string field_to_string(const FieldValue& v);

/// CSV with a stable column order taken from the first row (or the explicit
/// header for empty row lists). Values containing separators are quoted.
std::string to_csv(const std::vector<ReportRow>& rows,
                   const std::vector<std::string>& header = {});
std::string to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_csv(const std::string& text);

/// Write-then-rename so readers never observe a half-written report.
void write_atomic(const std::string& text, const std::string& path);

void emit(const std::vector<ReportRow>& rows, const std::string& format,
          const std::string& path, const std::vector<std::string>& header = {});

struct RunOverrides {
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> expect_experiment; // subcommand cross-check
};

/// Parse the config, run the experiment, write the report. Exit codes:
/// 0 success, 1 usage/config/IO error, 2 assertion-style failure (a bound
/// that should hold did not).
int run_experiment(const std::string& config_path,
                   const RunOverrides& overrides = {});

} // namespace qrob
