#pragma once

#include <array>
#include <cstdint>

namespace phib {

/// Philox4x32-10 block function. Maps a 128-bit counter and 64-bit key to
/// 128 pseudo-random bits; pure, so any (key, counter) can be evaluated in
/// any order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based generator addressed by (seed, stream, substream).
///
/// The 128-bit Philox counter is laid out as [draw, substream, stream_lo,
/// stream_hi], so two generators with different (stream, substream) pairs
/// can never produce overlapping blocks. Campaigns use stream for the
/// campaign and substream for the trial index, which makes results
/// independent of how trials are scheduled.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  /// Uniform on {-1, +1}.
  double rademacher() noexcept;

  std::uint32_t draws() const noexcept { return draw_; }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint32_t substream_;
  std::uint32_t draw_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace phib
