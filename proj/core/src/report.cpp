// SPDX-License-Identifier: Apache-2.0
#include "rpoint/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rpoint/error.hpp"

namespace rpoint {

namespace {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", x);
}

}  // namespace

void set_deviation(ReportRow& row) {
  const double diff = std::abs(row.estimate - row.target);
  if (row.std_err > 0.0) {
    row.dev_se = diff / row.std_err;
  } else {
    row.dev_se = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
}

bool Report::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void annotate(Report& report) {
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) { return a.n < b.n; });
  report.monotone.clear();
  std::map<std::string, std::vector<double>> deviations;
  std::vector<std::string> order;
  for (const auto& row : report.rows) {
    auto [it, inserted] = deviations.try_emplace(row.quantity);
    if (inserted) order.push_back(row.quantity);
    it->second.push_back(std::abs(row.estimate - row.target));
  }
  for (const auto& quantity : order) {
    const auto& devs = deviations[quantity];
    if (devs.size() < 2) {
      report.monotone[quantity] = std::nullopt;
      continue;
    }
    bool nonincreasing = true;
    for (std::size_t i = 1; i < devs.size(); ++i) nonincreasing = nonincreasing && devs[i] <= devs[i - 1];
    report.monotone[quantity] = nonincreasing;
  }
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.quantity << ',' << number(r.estimate.real()) << ','
        << number(r.estimate.imag()) << ',' << number(r.std_err) << ','
        << number(r.target.real()) << ',' << number(r.target.imag()) << ','
        << number(r.dev_se) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

void write_summary(std::ostream& out, const Report& report) {
  out << fmt::format("{:>6}  {:<44} {:>16} {:>12} {:>16} {:>9}  {}\n", "n", "quantity",
                     "estimate", "std_err", "target", "dev_se", "pass");
  for (const auto& r : report.rows) {
    out << fmt::format("{:>6}  {:<44} {:>16} {:>12} {:>16} {:>9}  {}\n", r.n, r.quantity,
                       number(r.estimate.real()), number(r.std_err), number(r.target.real()),
                       number(r.dev_se), r.pass ? "PASS" : "FAIL");
  }
  bool any_annotation = false;
  for (const auto& [quantity, monotone] : report.monotone) {
    if (!monotone) continue;
    if (!any_annotation) out << "\nmonotone |estimate - target| in n (informational):\n";
    any_annotation = true;
    out << "  " << quantity << ": " << (*monotone ? "yes" : "no") << '\n';
  }
  const auto failed = std::count_if(report.rows.begin(), report.rows.end(),
                                    [](const ReportRow& r) { return !r.pass; });
  out << fmt::format("\n{} rows, {} failed: {}\n", report.rows.size(), failed,
                     failed == 0 ? "ALL PASS" : "FAIL");
}

std::string sanitize_quantity(std::string_view quantity) {
  std::string out;
  out.reserve(quantity.size());
  for (char c : quantity) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

void write_report_files(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [](const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    return out;
  };
  {
    auto out = open(dir / "report.csv");
    write_csv(out, report.rows);
  }
  {
    auto out = open(dir / "summary.txt");
    write_summary(out, report);
  }
  std::map<std::string, std::vector<const ReportRow*>> by_quantity;
  for (const auto& row : report.rows) by_quantity[row.quantity].push_back(&row);
  for (const auto& [quantity, rows] : by_quantity) {
    auto out = open(dir / ("plot_" + sanitize_quantity(quantity) + ".csv"));
    out << "n,estimate,se,target\n";
    for (const auto* r : rows) {
      out << r->n << ',' << number(r->estimate.real()) << ',' << number(r->std_err) << ','
          << number(r->target.real()) << '\n';
    }
  }
}

}  // namespace rpoint
