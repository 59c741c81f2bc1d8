// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rpoint/branching.hpp"

namespace rpoint {

/// Which pair (C1, C3) turns counts into masses.
///
/// Standard: C1 = gamma^{-1/2}, C3 = 1. MomentMatched: C1 = 1/gamma, C3 = gamma,
/// the choice that makes the first two mass moments of mu_n match those of
/// the canonical measure. The two agree when gamma = 1.
enum class ConstantConvention { Standard, MomentMatched };

/// Mass scale c1, space scale c2, measure weight c3 and scaling index n.
struct ScalingConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  std::uint32_t n = 1;

  /// Defaults for a model: c2 is the kernel's per-coordinate standard
  /// deviation (d^{-1/2} for nearest-neighbour steps).
  static ScalingConstants for_model(const Model& model, std::uint32_t n,
                                    ConstantConvention convention = ConstantConvention::Standard);

  /// Throws DomainError unless c1, c2, c3 > 0 and n >= 1.
  void validate() const;

  /// Weight c3 * n carried by every mu_n expectation.
  double weight() const noexcept { return c3 * static_cast<double>(n); }
};

/// Generation whose value the path holds at time t, i.e. floor(n t). Products
/// within 1e-9 (relative) below an integer snap up so that t = m/n maps to m.
std::uint64_t generation_index(std::uint32_t n, double t);

/// Atomic finite measure on R^d with strictly positive masses.
class FiniteMeasure {
 public:
  explicit FiniteMeasure(int dimension) : dimension_(dimension) {}

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return masses_.size(); }
  bool empty() const noexcept { return masses_.empty(); }

  std::span<const double> position(std::size_t i) const noexcept {
    return {positions_.data() + i * static_cast<std::size_t>(dimension_),
            static_cast<std::size_t>(dimension_)};
  }
  double mass(std::size_t i) const noexcept { return masses_[i]; }

  /// Throws DomainError for a non-positive mass or wrong dimension.
  void add_atom(std::span<const double> position, double mass);

  double total_mass() const noexcept;

  bool operator==(const FiniteMeasure&) const = default;

 private:
  int dimension_;
  std::vector<double> positions_;
  std::vector<double> masses_;
};

/// Right-continuous step path of finite measures: generation m is the
/// value on [m/n, (m+1)/n).
class MeasurePath {
 public:
  MeasurePath(std::uint32_t n, int dimension, std::vector<FiniteMeasure> measures,
              double horizon_time, std::optional<std::uint64_t> extinct_at);

  std::uint32_t n() const noexcept { return n_; }
  int dimension() const noexcept { return zero_.dimension(); }
  double horizon_time() const noexcept { return horizon_time_; }
  std::optional<std::uint64_t> extinct_at() const noexcept { return extinct_at_; }
  std::span<const FiniteMeasure> measures() const noexcept { return measures_; }

  /// Value at generation m (0_M once extinct).
  const FiniteMeasure& at_generation(std::uint64_t m) const;
  /// Value at time t in [0, horizon_time]; throws HorizonError past it.
  const FiniteMeasure& at(double t) const;

  /// S > eps, evaluated on the generation grid: holds iff the first empty
  /// generation exceeds floor(n eps).
  bool survives_past(double eps) const;

 private:
  std::uint32_t n_;
  std::vector<FiniteMeasure> measures_;
  double horizon_time_;
  std::optional<std::uint64_t> extinct_at_;
  FiniteMeasure zero_;
};

/// X^n_t = (c1/n) sum_particles delta_{x / (c2 sqrt n)}; sites are
/// aggregated, so an atom's mass is count * c1/n.
MeasurePath rescale(const Trajectory& traj, const ScalingConstants& constants);

/// X(phi_k) = sum_atoms mass * e^{i k . position}.
Complex integrate(const FiniteMeasure& measure, std::span<const double> k);

/// Marker for a path still alive at its horizon.
struct Censored {
  double horizon_time;
};

using ExtinctionTime = std::variant<double, Censored>;

/// First extinct generation / n, or Censored{horizon_time}.
ExtinctionTime extinction_time(const MeasurePath& path);

/// (X_{t_1}, ..., X_{t_l}).
std::vector<FiniteMeasure> project(const MeasurePath& path, std::span<const double> times);

}  // namespace rpoint
