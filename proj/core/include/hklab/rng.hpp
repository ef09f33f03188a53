#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hklab {

/// Philox4x32-10 counter-based generator (Salmon et al.). Stateless: every output block is a
/// pure function of (counter, key).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Stream of uniforms addressed by (seed, stream, index). Each path owns one stream; draws are
/// numbered so a path is reproducible regardless of which thread runs it.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  /// 53-bit uniform in (0, 1].
  double uniform_pos() { return (static_cast<double>(next64() >> 11) + 1.0) * 0x1.0p-53; }
  /// 53-bit uniform in [0, 1).
  double uniform() { return static_cast<double>(next64() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  std::uint64_t next64() {
    if (used_ >= 2) refill();
    const std::uint64_t hi = block_[2 * used_], lo = block_[2 * used_ + 1];
    ++used_;
    return (hi << 32) | lo;
  }

  std::uint64_t draws() const { return counter_ * 2 - (2 - used_); }

 private:
  void refill() {
    block_ = Philox4x32::generate({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                   static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                  key_);
    ++counter_;
    used_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Philox4x32::Block block_{};
  unsigned used_ = 2;
};

}  // namespace hklab
