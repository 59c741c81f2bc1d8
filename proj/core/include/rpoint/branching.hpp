// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "rpoint/error.hpp"
#include "rpoint/kernel.hpp"
#include "rpoint/offspring.hpp"

namespace rpoint {

using Complex = std::complex<double>;

/// Offspring law and step kernel of one critical branching random walk.
struct Model {
  OffspringLaw law;
  StepKernel kernel;

  int dimension() const noexcept { return kernel.dimension(); }
};

/// Particle counts per occupied lattice site at one generation.
///
/// Sites are stored flat (dimension coordinates each) in strictly increasing
/// lexicographic order; every stored count is >= 1. No sites means extinct.
class ParticleConfiguration {
 public:
  explicit ParticleConfiguration(int dimension, std::uint64_t generation = 0)
      : dimension_(dimension), generation_(generation) {}

  /// One particle at the origin, generation 0.
  static ParticleConfiguration ancestor(int dimension) {
    ParticleConfiguration config(dimension, 0);
    config.sites_.assign(static_cast<std::size_t>(dimension), 0);
    config.counts_.push_back(1);
    return config;
  }

  int dimension() const noexcept { return dimension_; }
  std::uint64_t generation() const noexcept { return generation_; }
  std::size_t occupied_sites() const noexcept { return counts_.size(); }
  bool extinct() const noexcept { return counts_.empty(); }

  std::span<const std::int64_t> site(std::size_t i) const noexcept {
    return {sites_.data() + i * static_cast<std::size_t>(dimension_),
            static_cast<std::size_t>(dimension_)};
  }
  std::uint64_t count(std::size_t i) const noexcept { return counts_[i]; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  std::uint64_t total_count() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  }

  /// Builds a configuration from an unordered list of particle sites,
  /// aggregating duplicates.
  static ParticleConfiguration from_particles(int dimension, std::uint64_t generation,
                                              std::vector<std::int64_t> particle_sites);

  bool operator==(const ParticleConfiguration&) const = default;

 private:
  int dimension_;
  std::uint64_t generation_;
  std::vector<std::int64_t> sites_;
  std::vector<std::uint64_t> counts_;
};

/// Where a trajectory's randomness came from.
struct Provenance {
  std::uint64_t master_seed = 0;
  std::uint32_t scaling_n = 0;
  std::uint32_t replicate = 0;
};

/// Generations 0..horizon of one branching random walk, cut after the first
/// extinct generation (which is kept, and is empty).
struct Trajectory {
  std::vector<ParticleConfiguration> configurations;
  std::uint64_t horizon = 0;
  std::optional<std::uint64_t> extinct_generation;
  std::shared_ptr<const Model> model;
  Provenance provenance;

  /// Z_m, or 0 past extinction. m must not exceed the horizon.
  std::uint64_t total_count(std::uint64_t generation) const {
    if (generation > horizon) throw HorizonError("generation beyond trajectory horizon");
    if (generation >= configurations.size()) return 0;
    return configurations[generation].total_count();
  }
};

/// Advances one generation: every particle draws an offspring count
/// (one stream value), every child then draws a step. Parents die.
template <class Gen>
ParticleConfiguration step_generation(const ParticleConfiguration& config,
                                      const OffspringLaw& law, const StepKernel& kernel,
                                      Gen& gen) {
  if (config.extinct()) throw DomainError("step_generation on an extinct configuration");
  const int d = config.dimension();
  if (d != kernel.dimension()) throw DomainError("configuration and kernel dimensions differ");
  const auto ud = static_cast<std::size_t>(d);

  std::vector<std::int64_t> children;
  children.reserve(config.total_count() * 2 * ud);
  std::vector<std::int64_t> step(ud);
  for (std::size_t i = 0; i < config.occupied_sites(); ++i) {
    const auto parent = config.site(i);
    for (std::uint64_t p = 0; p < config.count(i); ++p) {
      const std::uint32_t offspring = law.sample(gen);
      for (std::uint32_t c = 0; c < offspring; ++c) {
        kernel.sample(gen, step);
        for (std::size_t j = 0; j < ud; ++j) children.push_back(parent[j] + step[j]);
      }
    }
  }
  return ParticleConfiguration::from_particles(d, config.generation() + 1, std::move(children));
}

/// Runs generation steps from a single ancestor at the origin until
/// extinction or `horizon`.
template <class Gen>
Trajectory simulate(std::shared_ptr<const Model> model, std::uint64_t horizon, Gen& gen,
                    Provenance provenance = {}) {
  Trajectory traj;
  traj.horizon = horizon;
  traj.provenance = provenance;
  traj.configurations.push_back(ParticleConfiguration::ancestor(model->dimension()));
  for (std::uint64_t m = 0; m < horizon; ++m) {
    traj.configurations.push_back(
        step_generation(traj.configurations.back(), model->law, model->kernel, gen));
    if (traj.configurations.back().extinct()) {
      traj.extinct_generation = m + 1;
      break;
    }
  }
  traj.model = std::move(model);
  return traj;
}

template <class Gen>
Trajectory simulate(const OffspringLaw& law, const StepKernel& kernel, std::uint64_t horizon,
                    Gen& gen, Provenance provenance = {}) {
  return simulate(std::make_shared<const Model>(Model{law, kernel}), horizon, gen, provenance);
}

/// Limits for exact_small_oracle.
struct OracleBudget {
  std::size_t max_factors = 3;
  std::uint64_t max_total_generations = 12;
};

/// Exact E[ prod_i sum_{x at generation m_i} count(x) e^{i k_i . x} ] for a
/// single ancestor at the origin, by first-step recursion on the factorial
/// moments of the offspring law. No Monte Carlo error; throws BudgetError
/// when the request exceeds `budget`.
Complex exact_small_oracle(const OffspringLaw& law, const StepKernel& kernel,
                           std::span<const std::uint64_t> generations,
                           std::span<const std::vector<double>> frequencies,
                           OracleBudget budget = {});

}  // namespace rpoint
