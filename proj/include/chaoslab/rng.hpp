#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace chaoslab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter under a 64-bit key to 128
/// pseudo-random bits; a bijection in the counter for every key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Identifies one path of the simulation: the master seed, the replica it
/// belongs to, and a branch number (0 for the main path, >0 for conditional
/// continuations that share a frozen prefix).
struct PathKey {
  std::uint64_t master_seed = 0;
  std::uint32_t replica = 0;
  std::uint32_t branch = 0;

  PathKey with_branch(std::uint32_t b) const noexcept { return {master_seed, replica, b}; }
  friend bool operator==(const PathKey&, const PathKey&) = default;
};

/// Counter-based generator. The 128-bit counter is laid out as
/// (block, substream, branch, replica) so two streams that differ in any of
/// replica/branch/substream never share a counter value and therefore never
/// produce overlapping output.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(const PathKey& key, std::uint32_t substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t substream_;
  std::uint32_t branch_;
  std::uint32_t replica_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 2;  // number of 64-bit halves of buffer_ consumed
};

/// Stream that draws the coefficients of level k on a given path.
inline Stream level_stream(const PathKey& key, std::uint32_t level) noexcept {
  return Stream(key, level);
}

/// Splits a master seed into per-replica path keys.
struct SeedPlan {
  std::uint64_t master_seed = 0;

  PathKey path(std::uint32_t replica) const noexcept { return {master_seed, replica, 0}; }
  /// Auxiliary stream for replica-level draws that are not field levels.
  Stream replica_stream(std::uint32_t replica) const noexcept {
    return Stream(path(replica), std::numeric_limits<std::uint32_t>::max());
  }
};

}  // namespace chaoslab
