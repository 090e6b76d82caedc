#include "ergolab/rng.hpp"

#include <cmath>

namespace ergolab {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::uint32_t c[4], const std::uint32_t k[2]) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t n0 = hi1 ^ c[1] ^ k[0];
  const std::uint32_t n1 = lo1;
  const std::uint32_t n2 = hi0 ^ c[3] ^ k[1];
  const std::uint32_t n3 = lo0;
  c[0] = n0;
  c[1] = n1;
  c[2] = n2;
  c[3] = n3;
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;  // 2^-53
constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::uint64_t seed,
                                               std::uint64_t stream,
                                               std::uint64_t index) {
  std::uint32_t c[4] = {
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32),
  };
  std::uint32_t k[2] = {
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
  };
  for (int r = 0; r < 10; ++r) {
    round_once(c, k);
    k[0] += kW0;
    k[1] += kW1;
  }
  return {c[0], c[1], c[2], c[3]};
}

std::array<double, 2> RngStream::uniform2(std::uint64_t index) const {
  const auto b = Philox4x32::block(seed_, stream_, index);
  const std::uint64_t u0 =
      (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
  const std::uint64_t u1 =
      (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
  return {static_cast<double>(u0 >> 11) * kTwoPow53Inv,
          static_cast<double>(u1 >> 11) * kTwoPow53Inv};
}

std::array<double, 2> RngStream::normal2(std::uint64_t index) const {
  const auto u = uniform2(index);
  // Shift u[0] into (0,1] so the log is finite.
  const double u1 = 1.0 - u[0];
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = kTwoPi * u[1];
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::uint64_t RngStream::uniform_index(std::uint64_t index,
                                       std::uint64_t n) const {
  const auto b = Philox4x32::block(seed_, stream_, index);
  const std::uint64_t u =
      (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
  // Multiplicative range reduction; bias is negligible for n << 2^64.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(u) * n) >> 64);
}

}  // namespace ergolab
