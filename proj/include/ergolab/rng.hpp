#pragma once

#include <array>
#include <cstdint>

// Counter-based randomness. Every draw is a pure function of
// (seed, stream, index), so sampling loops can be partitioned across workers
// arbitrarily without changing any result.

namespace ergolab {

// Philox4x32-10. block() is the raw generator; verified against the
// Random123 known-answer vectors in the tests.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t index);
};

// Operation tags keep substreams of one seed from colliding across call
// sites. Values are arbitrary but fixed: they are part of the
// reproducibility contract.
namespace stream_tag {
constexpr std::uint64_t sample = 1;
constexpr std::uint64_t integrate = 2;
constexpr std::uint64_t directions = 3;
constexpr std::uint64_t brownian_path = 4;
constexpr std::uint64_t observable = 5;
constexpr std::uint64_t base_points = 6;
constexpr std::uint64_t mc_config = 7;
}  // namespace stream_tag

constexpr std::uint64_t substream(std::uint64_t tag, std::uint64_t task) {
  return (tag << 48) ^ task;
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  // Two uniforms in [0,1) from counter block `index`.
  std::array<double, 2> uniform2(std::uint64_t index) const;
  double uniform(std::uint64_t index) const { return uniform2(index)[0]; }

  // Box-Muller pair of standard normals from counter block `index`.
  std::array<double, 2> normal2(std::uint64_t index) const;

  // k-th standard normal of the stream (random access; two per block).
  double normal_at(std::uint64_t k) const {
    return normal2(k >> 1)[k & 1];
  }

  // Uniform integer in [0, n) from counter block `index`.
  std::uint64_t uniform_index(std::uint64_t index, std::uint64_t n) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace ergolab
