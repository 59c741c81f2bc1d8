// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>

namespace rpoint {

struct KsResult {
  /// max over sample points x of |F_N(x) - F(x)|, F_N right-continuous.
  double statistic = 0.0;
  /// DKW bound sqrt(ln(2/alpha) / (2N)).
  double threshold = 0.0;
  /// Declared discretization allowance added to the threshold.
  double allowance = 0.0;
  bool pass = false;
};

/// Kolmogorov-Smirnov distance of `samples` to a continuous reference CDF.
/// Throws DomainError for an empty sample or alpha outside (0, 1).
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                 double alpha = 0.001, double allowance = 0.0);

/// sqrt(ln(2/alpha) / (2N)).
double dkw_threshold(std::size_t n, double alpha);

}  // namespace rpoint
