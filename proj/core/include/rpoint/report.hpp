// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rpoint {

/// One compared quantity at one scaling index.
struct ReportRow {
  std::uint32_t n = 0;
  std::string quantity;
  std::complex<double> estimate;
  double std_err = 0.0;
  std::complex<double> target;
  /// |estimate - target| / SE (0 if they agree exactly, +inf if SE = 0 and they differ).
  double dev_se = 0.0;
  bool pass = false;
};

/// Fills dev_se from the other fields.
void set_deviation(ReportRow& row);

/// Rows across the n grid, with per-quantity monotonicity of |estimate - target|
/// (absent when the quantity appears at a single n).
struct Report {
  std::vector<ReportRow> rows;
  std::map<std::string, std::optional<bool>> monotone;

  bool all_pass() const;
};

/// Exact CSV header, in column order.
inline constexpr std::string_view kCsvHeader =
    "n,quantity,estimate_re,estimate_im,std_err,target_re,target_im,dev_se,pass";

/// Sorts rows by n (stable) and recomputes the monotonicity annotations.
void annotate(Report& report);

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::string to_csv(const std::vector<ReportRow>& rows);

/// Human-readable table plus annotations and an overall verdict.
void write_summary(std::ostream& out, const Report& report);

/// Writes report.csv, summary.txt and one plot_<quantity>.csv per quantity
/// (columns n,estimate,se,target) into `dir`, creating it if needed.
void write_report_files(const Report& report, const std::filesystem::path& dir);

/// File-system-safe form of a quantity identifier.
std::string sanitize_quantity(std::string_view quantity);

}  // namespace rpoint
