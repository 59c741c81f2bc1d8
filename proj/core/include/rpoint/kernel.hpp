// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "rpoint/rng.hpp"

namespace rpoint {

enum class KernelKind { NearestNeighbor, SpreadOutBox };

std::string_view to_string(KernelKind kind);

/// Symmetric displacement law on Z^d.
///
/// NearestNeighbor: uniform on the 2d unit vectors +-e_j.
/// SpreadOutBox(L): uniform on {y in Z^d : 0 < max_j |y_j| <= L}.
class StepKernel {
 public:
  static StepKernel nearest_neighbor(int dimension);
  static StepKernel spread_out_box(int dimension, int radius);

  KernelKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  int radius() const noexcept { return radius_; }
  /// Variance of a single coordinate of one step.
  double per_coordinate_variance() const noexcept { return coord_variance_; }

  /// Characteristic function E[cos(u . Y)]; real because the law is symmetric.
  double characteristic(std::span<const double> u) const;

  /// Draws one step into `step` (length = dimension).
  template <class Gen>
  void sample(Gen& gen, std::span<std::int64_t> step) const {
    if (kind_ == KernelKind::NearestNeighbor) {
      const std::uint64_t pick = uniform_below(gen, 2 * static_cast<std::uint64_t>(dimension_));
      for (auto& y : step) y = 0;
      step[pick >> 1] = (pick & 1u) ? 1 : -1;
      return;
    }
    const std::uint64_t width = 2 * static_cast<std::uint64_t>(radius_) + 1;
    for (;;) {
      bool origin = true;
      for (auto& y : step) {
        y = static_cast<std::int64_t>(uniform_below(gen, width)) - radius_;
        origin = origin && y == 0;
      }
      if (!origin) return;
    }
  }

 private:
  StepKernel(KernelKind kind, int dimension, int radius);

  KernelKind kind_;
  int dimension_;
  int radius_;
  double coord_variance_;
};

/// D-hat(u) for the kernel; throws DomainError on a dimension mismatch.
double step_char(const StepKernel& kernel, std::span<const double> u);

}  // namespace rpoint
