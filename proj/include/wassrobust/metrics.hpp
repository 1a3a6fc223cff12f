#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wassrobust {

/// One metrics line. Empty optionals serialize as empty cells.
struct MetricsRow {
    std::string run;
    std::string algo;
    std::size_t iter = 0;
    std::optional<double> objective;
    std::optional<double> stationarity;
    std::optional<double> clean_err;
    std::string attack;
    std::optional<double> eps;
    std::optional<double> adv_err;
    std::optional<double> ms;

    bool operator==(const MetricsRow&) const = default;
};

inline constexpr const char* kMetricsHeader =
    "run,algo,iter,objective,stationarity,clean_err,attack,eps,adv_err,ms";

/// Header plus one LF-terminated line per row. Byte-stable for equal rows.
std::string format_metrics(std::span<const MetricsRow> rows);
std::vector<MetricsRow> parse_metrics(const std::string& text);

/// Writes to `path + ".tmp"` and renames over `path`.
void write_metrics(std::span<const MetricsRow> rows, const std::string& path);
std::vector<MetricsRow> read_metrics(const std::string& path);

/// Atomic whole-file write used for every artifact.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace wassrobust
