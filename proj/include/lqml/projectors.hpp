#pragma once

#include <array>

#include "lqml/field.hpp"
#include "lqml/geometry.hpp"

namespace lqml {

using SpinMatrix = std::array<std::array<Complex, 4>, 4>;

/// Which spin projector: plus = (I - gamma_mu)/2, minus = (I + gamma_mu)/2.
enum class ProjSign : std::uint8_t { plus = 0, minus = 1 };

/// Compression of a rank-2 spin projection to two spins (6 complex with color)
/// and its reconstruction back to four.
///
///   h[s]  = 0.5 * (psi[s] + compress_coeff[s] * psi[partner[s]])      s = 0, 1
///   out[s] = h[s]                                                     s = 0, 1
///   out[2 + t] = expand_coeff[t] * h[expand_source[t]]                t = 0, 1
///
/// The coefficients are read off gamma_mu, which in the chiral basis has one
/// nonzero entry per row in the off-diagonal 2x2 blocks.
struct HalfSpinorMap {
  std::array<int, 2> partner{};
  std::array<Complex, 2> compress_coeff{};
  std::array<int, 2> expand_source{};
  std::array<Complex, 2> expand_coeff{};
};

/// Gamma matrices in a chiral basis, gamma_mu = [[0, A_mu], [A_mu^dagger, 0]]:
///
///   A_0 = I2,  A_1 = -i sigma_1,  A_2 = -i sigma_2,  A_3 = -i sigma_3.
///
/// Every gamma_mu is Hermitian, squares to I4, and the set anticommutes.
class ProjectorTable {
 public:
  static const ProjectorTable& chiral();

  const SpinMatrix& gamma(int mu) const { return gamma_[mu]; }
  /// Dense 4x4 projector (I -/+ gamma_mu)/2.
  SpinMatrix projector(int mu, ProjSign sign) const;
  const HalfSpinorMap& map(int mu, ProjSign sign) const {
    return maps_[mu][static_cast<int>(sign)];
  }

 private:
  ProjectorTable();

  std::array<SpinMatrix, kDims> gamma_{};
  std::array<std::array<HalfSpinorMap, 2>, kDims> maps_{};
};

}  // namespace lqml
