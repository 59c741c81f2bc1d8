// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rpoint/rng.hpp"

namespace rpoint {

enum class OffspringKind { Binary, PoissonOne, Geometric, CustomPmf };

/// Experiment laws must have variance > 0; test mode also admits the
/// degenerate law P(one child) = 1.
enum class LawMode { Experiment, Test };

std::string_view to_string(OffspringKind kind);

/// Critical offspring distribution: a probability table over counts
/// 0..size-1 with mean one and variance gamma.
class OffspringLaw {
 public:
  /// Largest admissible count for a custom table.
  static constexpr std::size_t kMaxSupport = 64;

  /// p(0) = p(2) = 1/2, gamma = 1.
  static OffspringLaw binary();
  /// Poisson(1) truncated where the tail drops below 1e-30, gamma = 1.
  static OffspringLaw poisson_one();
  /// p(j) = 2^-(j+1) on 0..64, gamma = 2.
  static OffspringLaw geometric();
  /// Validates nonnegativity, normalization and criticality to 1e-12.
  static OffspringLaw custom(std::vector<double> pmf, LawMode mode = LawMode::Experiment);

  OffspringKind kind() const noexcept { return kind_; }
  std::span<const double> pmf() const noexcept { return pmf_; }
  double mean() const noexcept { return mean_; }
  /// Offspring variance; the model's gamma.
  double variance() const noexcept { return variance_; }

  /// E[xi (xi-1) ... (xi-q+1)], computed from the table.
  double factorial_moment(unsigned q) const noexcept;

  /// Inverse-CDF draw consuming exactly one value from the stream.
  template <class Gen>
  std::uint32_t sample(Gen& gen) const {
    const double u = uniform01(gen);
    const std::size_t last = cdf_.size() - 1;
    for (std::size_t j = 0; j < last; ++j) {
      if (u < cdf_[j]) return static_cast<std::uint32_t>(j);
    }
    return static_cast<std::uint32_t>(last);
  }

 private:
  OffspringLaw(OffspringKind kind, std::vector<double> pmf, LawMode mode);

  OffspringKind kind_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

}  // namespace rpoint
