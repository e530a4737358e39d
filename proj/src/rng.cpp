#include "smp/rng.hpp"

#include <cmath>

namespace smp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = std::uint64_t(a) * std::uint64_t(b);
  hi = std::uint32_t(prod >> 32);
  lo = std::uint32_t(prod);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t path, std::uint32_t t,
                                        std::uint32_t block_idx) {
  std::uint32_t k0 = std::uint32_t(seed);
  std::uint32_t k1 = std::uint32_t(seed >> 32);
  std::array<std::uint32_t, 4> c = {std::uint32_t(path), std::uint32_t(path >> 32), t, block_idx};
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

std::uint64_t RngStream::next_u64() {
  if (word_pos_ > 2) {  // need two fresh words from one block
    buf_ = philox4x32(seed_, path_, t_, block_idx_++);
    word_pos_ = 0;
  }
  const std::uint64_t hi = buf_[std::size_t(word_pos_)];
  const std::uint64_t lo = buf_[std::size_t(word_pos_ + 1)];
  word_pos_ += 2;
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  const std::uint64_t bits = next_u64() >> 11;
  double u = double(bits) * 0x1.0p-53;
  if (u == 0.0) u = 0x1.0p-53;
  return u;
}

double RngStream::gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_gaussian_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(a);
  have_cached_ = true;
  return r * std::cos(a);
}

}  // namespace smp
