// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rpoint {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3", SC11). Pure function of a 128-bit counter and a
/// 64-bit key; matches the Random123 reference implementation bit for bit.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
        key[0] += kWeylA;
        key[1] += kWeylB;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMulA = 0xD2511F53u;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

  static constexpr Counter round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMulA} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMulB} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// SplitMix64 finalizer, used only to whiten the user's master seed into a
/// Philox key.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent random stream for one replicate.
///
/// The stream for (master seed, scaling index n, replicate i) is the Philox
/// sequence with key = splitmix64(seed) and counter words
/// {block_lo, block_hi, i, n}. Every block yields two 64-bit outputs
/// (words 0|1 and 2|3, low word first). Streams never overlap, and adding
/// replicates or changing the thread count cannot perturb an existing one.
class ReplicateStream {
 public:
  using result_type = std::uint64_t;

  ReplicateStream(std::uint64_t master_seed, std::uint32_t n, std::uint32_t replicate) noexcept
      : key_{static_cast<std::uint32_t>(splitmix64(master_seed)),
             static_cast<std::uint32_t>(splitmix64(master_seed) >> 32)},
        n_{n},
        replicate_{replicate} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (lane_ == 2) refill();
    return buffer_[lane_++];
  }

  /// Number of 64-bit values drawn so far.
  std::uint64_t draws() const noexcept { return block_ * 2 - (2 - lane_); }

 private:
  void refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32), replicate_, n_};
    const auto out = Philox4x32::block(ctr, key_);
    buffer_[0] = std::uint64_t{out[0]} | (std::uint64_t{out[1]} << 32);
    buffer_[1] = std::uint64_t{out[2]} | (std::uint64_t{out[3]} << 32);
    ++block_;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t n_;
  std::uint32_t replicate_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int lane_ = 2;
};

/// Uniform double in [0, 1) from the top 53 bits of one draw.
template <class Gen>
double uniform01(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by 64x64 -> 128 multiply-shift (Lemire,
/// no rejection; bias is bound / 2^64).
template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
  __extension__ using u128 = unsigned __int128;
  const u128 product = static_cast<u128>(gen()) * bound;
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace rpoint
