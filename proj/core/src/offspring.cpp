// SPDX-License-Identifier: Apache-2.0
#include "rpoint/offspring.hpp"

#include <cmath>
#include <string>

#include "rpoint/error.hpp"

namespace rpoint {

namespace {

constexpr double kTableTolerance = 1e-12;

}  // namespace

std::string_view to_string(OffspringKind kind) {
  switch (kind) {
    case OffspringKind::Binary:
      return "binary";
    case OffspringKind::PoissonOne:
      return "poisson";
    case OffspringKind::Geometric:
      return "geometric";
    case OffspringKind::CustomPmf:
      return "custom";
  }
  return "unknown";
}

OffspringLaw::OffspringLaw(OffspringKind kind, std::vector<double> pmf, LawMode mode)
    : kind_(kind), pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw DomainError("offspring pmf is empty");
  if (pmf_.size() > kMaxSupport + 1) {
    throw DomainError("offspring pmf support exceeds " + std::to_string(kMaxSupport));
  }
  double total = 0.0;
  for (double p : pmf_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("offspring pmf has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kTableTolerance) {
    throw DomainError("offspring pmf sums to " + std::to_string(total) + ", not 1");
  }

  double mean = 0.0;
  for (std::size_t j = 0; j < pmf_.size(); ++j) mean += static_cast<double>(j) * pmf_[j];
  double variance = 0.0;
  for (std::size_t j = 0; j < pmf_.size(); ++j) {
    const double dev = static_cast<double>(j) - mean;
    variance += dev * dev * pmf_[j];
  }
  if (std::abs(mean - 1.0) > kTableTolerance) {
    throw DomainError("offspring law is not critical: mean " + std::to_string(mean));
  }
  if (mode == LawMode::Experiment && !(variance > 0.0)) {
    throw DomainError("offspring variance must be positive outside test mode");
  }
  mean_ = mean;
  variance_ = variance;

  cdf_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < pmf_.size(); ++j) {
    acc += pmf_[j];
    cdf_[j] = acc;
  }
  cdf_.back() = 1.0;
}

OffspringLaw OffspringLaw::binary() {
  return OffspringLaw(OffspringKind::Binary, {0.5, 0.0, 0.5}, LawMode::Experiment);
}

OffspringLaw OffspringLaw::poisson_one() {
  std::vector<double> pmf;
  double term = std::exp(-1.0);
  for (unsigned j = 0; term > 1e-30; ++j) {
    pmf.push_back(term);
    term /= static_cast<double>(j + 1);
  }
  return OffspringLaw(OffspringKind::PoissonOne, std::move(pmf), LawMode::Experiment);
}

OffspringLaw OffspringLaw::geometric() {
  std::vector<double> pmf(kMaxSupport + 1);
  for (std::size_t j = 0; j < pmf.size(); ++j) pmf[j] = std::ldexp(1.0, -static_cast<int>(j + 1));
  // Fold the 2^-65 tail into the last cell so the table is exactly normalized.
  pmf.back() *= 2.0;
  return OffspringLaw(OffspringKind::Geometric, std::move(pmf), LawMode::Experiment);
}

OffspringLaw OffspringLaw::custom(std::vector<double> pmf, LawMode mode) {
  return OffspringLaw(OffspringKind::CustomPmf, std::move(pmf), mode);
}

double OffspringLaw::factorial_moment(unsigned q) const noexcept {
  double total = 0.0;
  for (std::size_t j = 0; j < pmf_.size(); ++j) {
    double falling = 1.0;
    for (unsigned r = 0; r < q; ++r) falling *= static_cast<double>(j) - r;
    total += falling * pmf_[j];
  }
  return total;
}

}  // namespace rpoint
