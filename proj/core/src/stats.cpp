// SPDX-License-Identifier: Apache-2.0
#include "rpoint/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rpoint/error.hpp"

namespace rpoint {

double dkw_threshold(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("DKW threshold needs a nonempty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                 double alpha, double allowance) {
  if (samples.empty()) throw DomainError("ks_test needs a nonempty sample");
  if (!(allowance >= 0.0)) throw DomainError("ks allowance must be nonnegative");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  double statistic = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    // F_N at a tied value counts the whole run of ties.
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    statistic = std::max(statistic, std::abs(static_cast<double>(j) / n - cdf(sorted[i])));
    i = j;
  }
  KsResult result;
  result.statistic = statistic;
  result.threshold = dkw_threshold(sorted.size(), alpha);
  result.allowance = allowance;
  result.pass = statistic <= result.threshold + allowance;
  return result;
}

}  // namespace rpoint
