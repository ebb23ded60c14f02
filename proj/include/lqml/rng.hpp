#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace lqml {

/// Portable seeded generator: std::mt19937_64 (bit-exact across standard
/// libraries) with a hand-rolled uniform/Gaussian mapping, since the standard
/// distributions are implementation-defined.
///
/// uniform(): top 53 bits of one engine draw, scaled into [0, 1).
/// gaussian(): Box-Muller on two uniforms, both outputs used in order.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lqml
