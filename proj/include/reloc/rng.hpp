#pragma once

#include <array>
#include <cstddef>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace reloc {

/// A seed plus a stream index. Equal specs give equal sample paths.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// ChaCha20 keystream keyed by (seed, stream) with the substream as nonce.
/// Construction costs nothing beyond the key schedule, so one generator per
/// replica is cheap, and any substream can be opened without touching the
/// others. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngSpec spec, std::uint64_t substream = 0);

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    if (pos_ == buf_.size()) refill();
    return buf_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  /// Number of failures before the first success, success probability p.
  std::uint64_t geometric(double p) {
    const double g = std::floor(std::log(uniform_open0()) / std::log1p(-p));
    return g >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(g);
  }
  /// Standard normal via Box-Muller, one value per call.
  double normal() {
    const double u = uniform_open0();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  void refill();

  std::array<unsigned char, 32> key_{};
  std::array<unsigned char, 8> nonce_{};
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 16> buf_{};
  std::size_t pos_ = buf_.size();
};

}  // namespace reloc
