// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rpoint/branching.hpp"
#include "rpoint/measure.hpp"

namespace rpoint {

/// One replicate handed to functionals: its raw lattice trajectory and,
/// built on first use, the rescaled measure path.
class Sample {
 public:
  Sample(std::uint64_t index, const Trajectory& trajectory, const ScalingConstants& constants)
      : index_(index), trajectory_(trajectory), constants_(constants) {}

  std::uint64_t index() const noexcept { return index_; }
  const Trajectory& trajectory() const noexcept { return trajectory_; }
  const ScalingConstants& constants() const noexcept { return constants_; }
  const MeasurePath& path() const;

 private:
  std::uint64_t index_;
  const Trajectory& trajectory_;
  const ScalingConstants& constants_;
  mutable std::optional<MeasurePath> path_;
};

/// R independent replicate paths at one scaling index n.
///
/// Paths are streamed, never stored: replicate i is regenerated on demand
/// from ReplicateStream(master_seed, n, i). Together with the weight
/// c3 * n this represents mu_n.
class Ensemble {
 public:
  /// Replicates are processed in blocks of this many; block partials are
  /// reduced in block order, so results never depend on the thread count.
  static constexpr std::uint64_t kBlockSize = 1024;

  Ensemble(std::shared_ptr<const Model> model, ScalingConstants constants,
           std::uint64_t replicates, double horizon_time, std::uint64_t master_seed,
           unsigned threads = 1);

  const Model& model() const noexcept { return *model_; }
  std::shared_ptr<const Model> model_ptr() const noexcept { return model_; }
  const ScalingConstants& constants() const noexcept { return constants_; }
  std::uint32_t n() const noexcept { return constants_.n; }
  std::uint64_t replicates() const noexcept { return replicates_; }
  double horizon_time() const noexcept { return horizon_time_; }
  std::uint64_t horizon_generation() const noexcept { return horizon_generation_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  unsigned threads() const noexcept { return threads_; }

  /// Same replicates under different constants (same n) or thread count.
  Ensemble with_constants(ScalingConstants constants) const;
  Ensemble with_threads(unsigned threads) const;

  /// Replicate i's trajectory.
  Trajectory trajectory(std::uint64_t i) const;

  std::uint64_t block_count() const noexcept {
    return (replicates_ + kBlockSize - 1) / kBlockSize;
  }

  /// Runs `per_block(first, last)` for every block [first, last) on the
  /// worker pool; the returned vector is in block order.
  template <class Result>
  std::vector<Result> map_blocks(
      const std::function<Result(std::uint64_t, std::uint64_t)>& per_block) const {
    std::vector<Result> results(block_count());
    run_blocks([&](std::uint64_t block) {
      const std::uint64_t first = block * kBlockSize;
      const std::uint64_t last = std::min(replicates_, first + kBlockSize);
      results[block] = per_block(first, last);
    });
    return results;
  }

  /// Simulates replicates [first, last) in order, calling visit on each.
  void visit_range(std::uint64_t first, std::uint64_t last,
                   const std::function<void(const Sample&)>& visit) const;

 private:
  void run_blocks(const std::function<void(std::uint64_t)>& task) const;

  std::shared_ptr<const Model> model_;
  ScalingConstants constants_;
  std::uint64_t replicates_;
  double horizon_time_;
  std::uint64_t horizon_generation_;
  std::uint64_t master_seed_;
  unsigned threads_;
};

}  // namespace rpoint
