// SPDX-License-Identifier: Apache-2.0
#include "rpoint/branching.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>

namespace rpoint {

ParticleConfiguration ParticleConfiguration::from_particles(
    int dimension, std::uint64_t generation, std::vector<std::int64_t> particle_sites) {
  ParticleConfiguration config(dimension, generation);
  const auto d = static_cast<std::size_t>(dimension);
  if (particle_sites.empty()) return config;
  if (particle_sites.size() % d != 0) throw DomainError("particle site list is ragged");

  if (d == 1) {
    std::sort(particle_sites.begin(), particle_sites.end());
    for (std::size_t i = 0; i < particle_sites.size();) {
      std::size_t j = i + 1;
      while (j < particle_sites.size() && particle_sites[j] == particle_sites[i]) ++j;
      config.sites_.push_back(particle_sites[i]);
      config.counts_.push_back(j - i);
      i = j;
    }
    return config;
  }

  const std::size_t particles = particle_sites.size() / d;
  std::vector<std::size_t> order(particles);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto at = [&](std::size_t p) { return particle_sites.begin() + static_cast<std::ptrdiff_t>(p * d); };
  const auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(at(a), at(a) + static_cast<std::ptrdiff_t>(d), at(b),
                                        at(b) + static_cast<std::ptrdiff_t>(d));
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 0; i < particles;) {
    std::size_t j = i + 1;
    while (j < particles && std::equal(at(order[i]), at(order[i]) + static_cast<std::ptrdiff_t>(d),
                                       at(order[j]))) {
      ++j;
    }
    config.sites_.insert(config.sites_.end(), at(order[i]), at(order[i]) + static_cast<std::ptrdiff_t>(d));
    config.counts_.push_back(j - i);
    i = j;
  }
  return config;
}

namespace {

using Mask = unsigned;

/// Calls `visit` with every set partition of `mask` (as a list of block masks).
void for_each_partition(Mask mask, std::vector<Mask>& blocks,
                        const std::function<void(const std::vector<Mask>&)>& visit) {
  if (mask == 0) {
    visit(blocks);
    return;
  }
  const Mask lowest = mask & (~mask + 1);
  const Mask rest = mask & ~lowest;
  // Every subset of `rest` may join the block containing the lowest element.
  for (Mask sub = rest;; sub = (sub - 1) & rest) {
    blocks.push_back(lowest | sub);
    for_each_partition(rest & ~sub, blocks, visit);
    blocks.pop_back();
    if (sub == 0) break;
  }
}

class FirstStepRecursion {
 public:
  FirstStepRecursion(const OffspringLaw& law, const StepKernel& kernel,
                     std::span<const std::uint64_t> generations,
                     std::span<const std::vector<double>> frequencies)
      : law_(law), kernel_(kernel), generations_(generations), frequencies_(frequencies) {
    for (unsigned q = 0; q <= generations.size(); ++q) {
      falling_.push_back(law.factorial_moment(q));
    }
  }

  /// Moment of the factors in `mask` for a subtree rooted `shift`
  /// generations below the ancestor.
  Complex moment(Mask mask, std::uint64_t shift) {
    for (std::size_t i = 0; i < generations_.size(); ++i) {
      if ((mask >> i & 1u) && generations_[i] == shift) mask &= ~(Mask{1} << i);
    }
    if (mask == 0) return 1.0;
    const auto key = std::make_pair(mask, shift);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;

    Complex total = 0.0;
    std::vector<Mask> blocks;
    for_each_partition(mask, blocks, [&](const std::vector<Mask>& partition) {
      Complex term = falling_[partition.size()];
      if (term == 0.0) return;
      for (Mask block : partition) {
        term *= kernel_.characteristic(block_frequency(block)) * moment(block, shift + 1);
      }
      total += term;
    });
    memo_.emplace(key, total);
    return total;
  }

 private:
  std::vector<double> block_frequency(Mask block) const {
    std::vector<double> sum(static_cast<std::size_t>(kernel_.dimension()), 0.0);
    for (std::size_t i = 0; i < frequencies_.size(); ++i) {
      if (!(block >> i & 1u)) continue;
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += frequencies_[i][j];
    }
    return sum;
  }

  const OffspringLaw& law_;
  const StepKernel& kernel_;
  std::span<const std::uint64_t> generations_;
  std::span<const std::vector<double>> frequencies_;
  std::vector<double> falling_;
  std::map<std::pair<Mask, std::uint64_t>, Complex> memo_;
};

}  // namespace

Complex exact_small_oracle(const OffspringLaw& law, const StepKernel& kernel,
                           std::span<const std::uint64_t> generations,
                           std::span<const std::vector<double>> frequencies,
                           OracleBudget budget) {
  if (generations.size() != frequencies.size()) {
    throw DomainError("oracle needs one frequency per generation");
  }
  for (const auto& k : frequencies) {
    if (static_cast<int>(k.size()) != kernel.dimension()) {
      throw DomainError("oracle frequency dimension differs from kernel dimension");
    }
  }
  if (generations.size() > budget.max_factors || generations.size() > 16) {
    throw BudgetError("oracle supports at most " + std::to_string(budget.max_factors) +
                      " factors");
  }
  std::uint64_t total = 0;
  for (auto m : generations) total += m;
  if (total > budget.max_total_generations) {
    throw BudgetError("oracle generation budget exceeded: sum " + std::to_string(total) +
                      " > " + std::to_string(budget.max_total_generations));
  }
  FirstStepRecursion recursion(law, kernel, generations, frequencies);
  const Mask all = (Mask{1} << generations.size()) - 1;
  return recursion.moment(all, 0);
}

}  // namespace rpoint
