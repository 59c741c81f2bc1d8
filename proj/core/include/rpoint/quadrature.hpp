// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "rpoint/error.hpp"

namespace rpoint {

enum class QuadratureRule { AdaptiveSimpson };

struct QuadratureConfig {
  double abs_tolerance = 1e-8;
  int max_depth = 30;
  QuadratureRule rule = QuadratureRule::AdaptiveSimpson;

  void validate() const {
    if (!(abs_tolerance > 0.0)) throw DomainError("quadrature tolerance must be positive");
    if (max_depth < 1) throw DomainError("quadrature depth must be at least 1");
  }
};

namespace detail {

template <class F>
double simpson_panel(F& f, double a, double fa, double m, double fm, double b, double fb,
                     double whole, double tol, int depth, int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= max_depth) {
    throw QuadratureError("adaptive Simpson did not reach tolerance " + std::to_string(tol) +
                          " within depth " + std::to_string(max_depth));
  }
  return simpson_panel(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_panel(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive Simpson integral of f over [a, b] to absolute tolerance, with
/// Richardson correction on accepted panels. The interval is pre-split into
/// four panels so a single lucky coincidence cannot end the refinement.
template <class F>
double integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& config) {
  config.validate();
  if (a == b) return 0.0;
  constexpr int kPanels = 4;
  const double width = (b - a) / kPanels;
  double total = 0.0;
  double left = a;
  double f_left = f(left);
  for (int p = 0; p < kPanels; ++p) {
    const double right = p + 1 == kPanels ? b : a + width * (p + 1);
    const double mid = 0.5 * (left + right);
    const double f_mid = f(mid);
    const double f_right = f(right);
    const double whole = (right - left) / 6.0 * (f_left + 4.0 * f_mid + f_right);
    total += detail::simpson_panel(f, left, f_left, mid, f_mid, right, f_right, whole,
                                   config.abs_tolerance / kPanels, 1, config.max_depth);
    left = right;
    f_left = f_right;
  }
  return total;
}

}  // namespace rpoint
