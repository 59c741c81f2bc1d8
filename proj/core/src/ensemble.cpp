// SPDX-License-Identifier: Apache-2.0
#include "rpoint/ensemble.hpp"

#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "rpoint/rng.hpp"

namespace rpoint {

const MeasurePath& Sample::path() const {
  if (!path_) path_.emplace(rescale(trajectory_, constants_));
  return *path_;
}

Ensemble::Ensemble(std::shared_ptr<const Model> model, ScalingConstants constants,
                   std::uint64_t replicates, double horizon_time, std::uint64_t master_seed,
                   unsigned threads)
    : model_(std::move(model)),
      constants_(constants),
      replicates_(replicates),
      horizon_time_(horizon_time),
      horizon_generation_(0),
      master_seed_(master_seed),
      threads_(threads == 0 ? 1 : threads) {
  if (!model_) throw DomainError("ensemble needs a model");
  constants_.validate();
  if (replicates_ == 0) throw DomainError("ensemble needs at least one replicate");
  if (replicates_ > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("replicate index must fit the 32-bit stream counter");
  }
  if (!(horizon_time_ >= 0.0)) throw DomainError("horizon time must be nonnegative");
  horizon_generation_ = generation_index(constants_.n, horizon_time_);
}

Ensemble Ensemble::with_constants(ScalingConstants constants) const {
  if (constants.n != constants_.n) {
    throw DomainError("with_constants keeps n fixed; build a new ensemble instead");
  }
  return Ensemble(model_, constants, replicates_, horizon_time_, master_seed_, threads_);
}

Ensemble Ensemble::with_threads(unsigned threads) const {
  return Ensemble(model_, constants_, replicates_, horizon_time_, master_seed_, threads);
}

Trajectory Ensemble::trajectory(std::uint64_t i) const {
  if (i >= replicates_) throw DomainError("replicate index out of range");
  ReplicateStream stream(master_seed_, constants_.n, static_cast<std::uint32_t>(i));
  return simulate(model_, horizon_generation_, stream,
                  Provenance{master_seed_, constants_.n, static_cast<std::uint32_t>(i)});
}

void Ensemble::visit_range(std::uint64_t first, std::uint64_t last,
                           const std::function<void(const Sample&)>& visit) const {
  for (std::uint64_t i = first; i < last; ++i) {
    const Trajectory traj = trajectory(i);
    const Sample sample(i, traj, constants_);
    visit(sample);
  }
}

void Ensemble::run_blocks(const std::function<void(std::uint64_t)>& task) const {
  const std::uint64_t blocks = block_count();
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(threads_, blocks));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) task(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t b = next.fetch_add(1);
          if (b >= blocks) return;
          try {
            task(b);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(blocks);
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rpoint
