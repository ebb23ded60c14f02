#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "lqml/field.hpp"
#include "lqml/geometry.hpp"
#include "lqml/wilson_dirac.hpp"

namespace lqml {

/// Parity partition of a lattice. Half fields hold the sites of one parity in
/// ascending natural order; position() maps a natural site to its slot in
/// its own half.
class OeSplit {
 public:
  explicit OeSplit(const LatticeGeometry& geom);

  const std::vector<std::uint32_t>& sites(Parity p) const {
    return p == Parity::even ? even_ : odd_;
  }
  std::size_t half_sites() const noexcept { return even_.size(); }
  std::size_t n_sites() const noexcept { return pos_.size(); }
  std::uint32_t position(std::size_t natural) const { return pos_[natural]; }

  /// Value-preserving partition; merge(split(v)) == v.
  std::pair<BlockSpinorField, BlockSpinorField> split(const BlockSpinorField& v) const;
  BlockSpinorField extract(const BlockSpinorField& v, Parity p) const;
  BlockSpinorField merge(const BlockSpinorField& even, const BlockSpinorField& odd) const;
  /// Writes a half field into the sites of parity p of a full field.
  void insert(const BlockSpinorField& half, Parity p, BlockSpinorField& full) const;

 private:
  std::vector<std::uint32_t> even_;
  std::vector<std::uint32_t> odd_;
  std::vector<std::uint32_t> pos_;
};

/// Condition number (1-norm) above which a diagonal block counts as singular.
constexpr double kSingularBlockThreshold = 1e12;

/// Schur complement of the Wilson-Dirac operator on one parity:
///
///   S = D_kk - D_ke D_ee^-1 D_ek       (k = kept parity, e = eliminated)
///
/// D_ee is site-block-diagonal ((4 + m0) I - C(x)), so its inverse is exact:
/// the two 6x6 blocks of every eliminated site are inverted once at
/// construction through a partially pivoted LU. Blocks whose estimated
/// condition number exceeds kSingularBlockThreshold raise SingularBlockError.
class SchurOperator {
 public:
  explicit SchurOperator(const WilsonDirac& dirac, Parity keep = Parity::even);

  const WilsonDirac& dirac() const noexcept { return dirac_; }
  const OeSplit& oe() const noexcept { return split_; }
  Parity kept() const noexcept { return keep_; }
  Parity eliminated() const noexcept {
    return keep_ == Parity::even ? Parity::odd : Parity::even;
  }

  /// w = S v on half fields of the kept parity.
  void apply(const BlockSpinorField& v, BlockSpinorField& w) const;
  BlockSpinorField apply(const BlockSpinorField& v) const;

  /// Reduced right-hand side eta_k - D_ke D_ee^-1 eta_e from a full eta.
  BlockSpinorField reduced_rhs(const BlockSpinorField& eta) const;
  /// Full solution from the kept half: x_e = D_ee^-1 (eta_e - D_ek x_k).
  BlockSpinorField reconstruct(const BlockSpinorField& x_kept, const BlockSpinorField& eta) const;

  /// out = D_ee^-1 in on eliminated sites of full fields; other sites of out
  /// are left untouched.
  void apply_block_inverse(const BlockSpinorField& in, BlockSpinorField& out) const;
  /// The inverted 6x6 block (row-major) of natural site x, which must be eliminated.
  const std::array<Complex, 36>& block_inverse(std::size_t x, int which) const;

 private:
  const WilsonDirac& dirac_;
  Parity keep_;
  OeSplit split_;
  // two inverted blocks per eliminated site, in half-field order
  std::vector<std::array<Complex, 36>> inv_;
};

/// Inverse of a 6x6 complex matrix (row-major) via LU with partial pivoting.
/// Returns the 1-norm condition estimate ||A||_1 ||A^-1||_1, or infinity when
/// a pivot vanishes (inv is then unspecified).
double invert_block6(const std::array<Complex, 36>& a, std::array<Complex, 36>& inv);

}  // namespace lqml
