// SPDX-License-Identifier: Apache-2.0
#include "rpoint/measure.hpp"

#include <cmath>
#include <string>

namespace rpoint {

ScalingConstants ScalingConstants::for_model(const Model& model, std::uint32_t n,
                                             ConstantConvention convention) {
  const double gamma = model.law.variance();
  if (!(gamma > 0.0)) throw DomainError("default scaling constants need gamma > 0");
  ScalingConstants constants;
  constants.n = n;
  constants.c2 = std::sqrt(model.kernel.per_coordinate_variance());
  if (convention == ConstantConvention::Standard) {
    constants.c1 = 1.0 / std::sqrt(gamma);
    constants.c3 = 1.0;
  } else {
    constants.c1 = 1.0 / gamma;
    constants.c3 = gamma;
  }
  constants.validate();
  return constants;
}

void ScalingConstants::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0)) {
    throw DomainError("scaling constants c1, c2, c3 must be positive");
  }
  if (n < 1) throw DomainError("scaling index n must be at least 1");
}

std::uint64_t generation_index(std::uint32_t n, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and nonnegative");
  const double scaled = static_cast<double>(n) * t;
  const double floored = std::floor(scaled);
  if (floored + 1.0 - scaled <= 1e-9 * std::max(1.0, scaled)) {
    return static_cast<std::uint64_t>(floored) + 1;
  }
  return static_cast<std::uint64_t>(floored);
}

void FiniteMeasure::add_atom(std::span<const double> position, double mass) {
  if (static_cast<int>(position.size()) != dimension_) {
    throw DomainError("atom position has the wrong dimension");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("atom mass must be positive");
  positions_.insert(positions_.end(), position.begin(), position.end());
  masses_.push_back(mass);
}

double FiniteMeasure::total_mass() const noexcept {
  double total = 0.0;
  for (double m : masses_) total += m;
  return total;
}

MeasurePath::MeasurePath(std::uint32_t n, int dimension, std::vector<FiniteMeasure> measures,
                         double horizon_time, std::optional<std::uint64_t> extinct_at)
    : n_(n),
      measures_(std::move(measures)),
      horizon_time_(horizon_time),
      extinct_at_(extinct_at),
      zero_(dimension) {
  if (n < 1) throw DomainError("path scaling index must be at least 1");
  if (measures_.empty()) throw DomainError("path needs at least its generation-0 value");
}

const FiniteMeasure& MeasurePath::at_generation(std::uint64_t m) const {
  if (m < measures_.size()) return measures_[m];
  if (extinct_at_) return zero_;
  throw HorizonError("generation " + std::to_string(m) + " beyond path horizon");
}

const FiniteMeasure& MeasurePath::at(double t) const {
  if (t > horizon_time_) {
    throw HorizonError("time " + std::to_string(t) + " beyond path horizon " +
                       std::to_string(horizon_time_));
  }
  return at_generation(generation_index(n_, t));
}

bool MeasurePath::survives_past(double eps) const {
  if (!extinct_at_) return true;
  return *extinct_at_ > generation_index(n_, eps);
}

MeasurePath rescale(const Trajectory& traj, const ScalingConstants& constants) {
  constants.validate();
  const int d = traj.configurations.front().dimension();
  const double mass_unit = constants.c1 / static_cast<double>(constants.n);
  const double space_unit = 1.0 / (constants.c2 * std::sqrt(static_cast<double>(constants.n)));

  std::vector<FiniteMeasure> measures;
  measures.reserve(traj.configurations.size());
  std::vector<double> position(static_cast<std::size_t>(d));
  for (const auto& config : traj.configurations) {
    FiniteMeasure& measure = measures.emplace_back(d);
    for (std::size_t i = 0; i < config.occupied_sites(); ++i) {
      const auto site = config.site(i);
      for (std::size_t j = 0; j < position.size(); ++j) {
        position[j] = static_cast<double>(site[j]) * space_unit;
      }
      measure.add_atom(position, static_cast<double>(config.count(i)) * mass_unit);
    }
  }
  const double horizon_time =
      static_cast<double>(traj.horizon) / static_cast<double>(constants.n);
  return MeasurePath(constants.n, d, std::move(measures), horizon_time, traj.extinct_generation);
}

Complex integrate(const FiniteMeasure& measure, std::span<const double> k) {
  const auto d = static_cast<std::size_t>(measure.dimension());
  if (k.size() != d) throw DomainError("frequency dimension differs from measure dimension");
  double re = 0.0;
  double im = 0.0;
  bool zero = true;
  for (double kj : k) zero = zero && kj == 0.0;
  if (zero) return {measure.total_mass(), 0.0};
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const auto x = measure.position(i);
    double phase = 0.0;
    for (std::size_t j = 0; j < d; ++j) phase += k[j] * x[j];
    re += measure.mass(i) * std::cos(phase);
    im += measure.mass(i) * std::sin(phase);
  }
  return {re, im};
}

ExtinctionTime extinction_time(const MeasurePath& path) {
  if (path.extinct_at()) {
    return static_cast<double>(*path.extinct_at()) / static_cast<double>(path.n());
  }
  return Censored{path.horizon_time()};
}

std::vector<FiniteMeasure> project(const MeasurePath& path, std::span<const double> times) {
  std::vector<FiniteMeasure> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0.0) throw DomainError("projection time must be nonnegative");
    out.push_back(path.at(t));
  }
  return out;
}

}  // namespace rpoint
