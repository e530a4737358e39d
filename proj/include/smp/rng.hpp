#ifndef SMPSTAB_RNG_HPP
#define SMPSTAB_RNG_HPP

#include <array>
#include <cstdint>

// Counter-based random numbers (Philox4x32-10). Output is a pure function of
// (seed; path, t, block), so any path/time point of a simulation can be
// generated independently, in any order, on any platform, with identical
// results — no generator state is shared between paths.

namespace smp {

// One 128-bit Philox4x32-10 block for the given address.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t path, std::uint32_t t,
                                        std::uint32_t block_idx);

// An ordered stream of draws addressed by (seed; path, t). Successive calls
// walk block_idx 0, 1, 2, ... so the stream is unbounded.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t path, std::uint32_t t)
      : seed_(seed), path_(path), t_(t) {}

  // Uniform on (0, 1): (u64 >> 11) * 2^-53 with exact zero nudged to 2^-53,
  // keeping logarithms finite.
  double uniform();

  // Standard normal via Box-Muller; draws arrive in cached pairs.
  double gaussian();

 private:
  std::uint64_t next_u64();

  std::uint64_t seed_;
  std::uint64_t path_;
  std::uint32_t t_;
  std::uint32_t block_idx_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int word_pos_ = 4;  // empty buffer
  double cached_gaussian_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace smp

#endif
