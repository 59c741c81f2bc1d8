// SPDX-License-Identifier: Apache-2.0
#include "rpoint/csbm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "rpoint/error.hpp"

namespace rpoint::csbm {

void MomentSpec::validate() const {
  if (times.empty()) throw DomainError("moment spec needs at least one time");
  if (times.size() != frequencies.size()) {
    throw DomainError("moment spec has " + std::to_string(times.size()) + " times but " +
                      std::to_string(frequencies.size()) + " frequencies");
  }
  if (times.size() > 16) throw DomainError("moment spec supports at most 16 factors");
  for (double t : times) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("moment times must be positive");
  }
  const std::size_t d = frequencies.front().size();
  if (d == 0) throw DomainError("frequencies must have positive dimension");
  for (const auto& k : frequencies) {
    if (k.size() != d) throw DomainError("frequencies have differing dimensions");
  }
}

namespace {

void require_positive_time(double b, const char* name) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError(std::string(name) + " must be positive, got " + std::to_string(b));
  }
}

}  // namespace

double mass_density(double b, double x) {
  require_positive_time(b, "b");
  if (!(x > 0.0)) throw DomainError("mass density is defined for x > 0");
  const double rate = 2.0 / b;
  return rate * rate * std::exp(-rate * x);
}

double mass_tail(double b, double lambda) {
  require_positive_time(b, "b");
  if (!(lambda >= 0.0)) throw DomainError("mass tail threshold must be nonnegative");
  const double rate = 2.0 / b;
  return rate * std::exp(-rate * lambda);
}

double survival_mass(double eps) {
  require_positive_time(eps, "eps");
  return 2.0 / eps;
}

double mass_moment(double b, int p) {
  require_positive_time(b, "b");
  if (p < 1) throw DomainError("mass moment order must be at least 1");
  double factorial = 1.0;
  for (int j = 2; j <= p; ++j) factorial *= j;
  return factorial * std::pow(b / 2.0, p - 1);
}

double exp_moment_truncated(double eps, double theta) {
  require_positive_time(eps, "eps");
  if (!(theta < 2.0 / eps)) {
    throw DivergenceError("exponential moment diverges for theta >= 2/eps (theta = " +
                          std::to_string(theta) + ", eps = " + std::to_string(eps) + ")");
  }
  return 4.0 / (eps * (2.0 - eps * theta));
}

namespace {

using Mask = unsigned;

class MomentRecursion {
 public:
  MomentRecursion(const MomentSpec& spec, const QuadratureConfig& quad)
      : times_(spec.times), quad_(quad) {
    const std::size_t l = spec.order();
    const std::size_t d = spec.frequencies.front().size();
    sq_norm_.resize(std::size_t{1} << l);
    std::vector<double> sum(d);
    for (Mask mask = 1; mask < sq_norm_.size(); ++mask) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t i = 0; i < l; ++i) {
        if (!(mask >> i & 1u)) continue;
        for (std::size_t j = 0; j < d; ++j) sum[j] += spec.frequencies[i][j];
      }
      double sq = 0.0;
      for (double x : sum) sq += x * x;
      sq_norm_[mask] = sq;
    }
    double longest = 1.0;
    for (double t : times_) longest = std::max(longest, t);
    // Sub-moments at k = 0 are at most l! (longest/2)^{l-1}; this bounds how
    // much an inner error is amplified by its sibling factor.
    amplification_ = 1.0;
    for (std::size_t j = 2; j <= l; ++j) amplification_ *= static_cast<double>(j) * longest;
  }

  double moment(Mask mask, double offset, double tol) const {
    const int size = std::popcount(mask);
    if (size == 1) {
      const int i = std::countr_zero(mask);
      return std::exp(-0.5 * sq_norm_[mask] * (times_[static_cast<std::size_t>(i)] - offset));
    }
    const double upper = min_time(mask) - offset;
    if (!(upper > 0.0)) return 0.0;
    if (size == 2) return pair_moment(mask, offset, upper);

    const Mask lowest = mask & (~mask + 1);
    const Mask rest = mask & ~lowest;
    const int splits = (1 << (size - 1)) - 1;
    const double inner_tol = tol / (4.0 * std::max(1.0, upper) * splits * amplification_);
    QuadratureConfig level = quad_;
    level.abs_tolerance = tol;
    const auto integrand = [&](double s) {
      double sum = 0.0;
      // Blocks containing the lowest index enumerate each unordered split once.
      for (Mask sub = rest;; sub = (sub - 1) & rest) {
        const Mask block = lowest | sub;
        if (block != mask) {
          sum += moment(block, offset + s, inner_tol) * moment(mask & ~block, offset + s, inner_tol);
        }
        if (sub == 0) break;
      }
      return std::exp(-0.5 * sq_norm_[mask] * s) * sum;
    };
    return integrate_adaptive(integrand, 0.0, upper, level);
  }

 private:
  double min_time(Mask mask) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (mask >> i & 1u) m = std::min(m, times_[i]);
    }
    return m;
  }

  // Closed form of the two-factor integral: the exponent is linear in s
  // with slope k_i . k_j.
  double pair_moment(Mask mask, double offset, double upper) const {
    const int i = std::countr_zero(mask);
    const int j = std::countr_zero(mask & (mask - 1));
    const Mask mi = Mask{1} << i;
    const Mask mj = Mask{1} << j;
    const double ti = times_[static_cast<std::size_t>(i)] - offset;
    const double tj = times_[static_cast<std::size_t>(j)] - offset;
    const double base = std::exp(-0.5 * (sq_norm_[mi] * ti + sq_norm_[mj] * tj));
    const double slope = 0.5 * (sq_norm_[mask] - sq_norm_[mi] - sq_norm_[mj]);
    const double integral = slope == 0.0 ? upper : -std::expm1(-slope * upper) / slope;
    return base * integral;
  }

  std::vector<double> times_;
  std::vector<double> sq_norm_;
  QuadratureConfig quad_;
  double amplification_ = 1.0;
};

}  // namespace

Complex moment_function(const MomentSpec& spec, const QuadratureConfig& quad) {
  spec.validate();
  quad.validate();
  const MomentRecursion recursion(spec, quad);
  const Mask all = (Mask{1} << spec.order()) - 1;
  return {recursion.moment(all, 0.0, quad.abs_tolerance), 0.0};
}

}  // namespace rpoint::csbm
