#include "chaoslab/rng.hpp"

namespace chaoslab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

Stream::Stream(const PathKey& key, std::uint32_t substream) noexcept
    : key_{static_cast<std::uint32_t>(key.master_seed),
           static_cast<std::uint32_t>(key.master_seed >> 32)},
      substream_(substream),
      branch_(key.branch),
      replica_(key.replica) {}

Stream::result_type Stream::operator()() noexcept {
  if (used_ == 2) {
    buffer_ = philox4x32({block_++, substream_, branch_, replica_}, key_);
    used_ = 0;
  }
  const std::size_t i = static_cast<std::size_t>(used_++) * 2;
  return (static_cast<std::uint64_t>(buffer_[i + 1]) << 32) | buffer_[i];
}

}  // namespace chaoslab
