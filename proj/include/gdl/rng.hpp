#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace gdl {

/// Philox4x32-10 counter-based generator. Every draw is a pure function of
/// (key, counter), so samples do not depend on how work is split across threads.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Stream of standard complex Gaussians addressed by (seed, stream, index).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  /// Complex Gaussian with E g = 0, E g^2 = 0, E|g|^2 = 1 (Box-Muller on one Philox block).
  std::complex<double> complex_normal(std::uint64_t index) const;

  /// Uniform on (0, 1], 53-bit resolution; the two values come from one Philox block.
  std::array<double, 2> uniform_pair(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace gdl
