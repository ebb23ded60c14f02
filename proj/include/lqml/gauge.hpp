#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lqml/field.hpp"
#include "lqml/geometry.hpp"

namespace lqml {

class Rng;

/// 3x3 complex color matrix, row-major.
using ColorMatrix = std::array<Complex, 9>;

/// One SU(3) link per site and direction, stored [site][mu][row][col].
class GaugeField {
 public:
  GaugeField() = default;
  explicit GaugeField(std::size_t sites) : sites_(sites), data_(sites * kDims * 9) {}

  std::size_t sites() const noexcept { return sites_; }
  const Complex* link(std::size_t x, int mu) const { return data_.data() + (x * kDims + mu) * 9; }
  Complex* link(std::size_t x, int mu) { return data_.data() + (x * kDims + mu) * 9; }
  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

 private:
  std::size_t sites_ = 0;
  std::vector<Complex> data_;
};

constexpr int kCloverBlockSize = 6;
constexpr int kCloverTriangle = 21;  // lower triangle incl. diagonal of a 6x6 block
constexpr int kCloverPerSite = 42;

/// Packed index of (row, col), row >= col, inside one 21-entry triangle.
constexpr int clover_tri_index(int row, int col) { return row * (row + 1) / 2 + col; }

/// Two 6x6 Hermitian blocks per site (spin components 0-5 and 6-11), each
/// packed as its row-major lower triangle.
class CloverField {
 public:
  CloverField() = default;
  explicit CloverField(std::size_t sites) : sites_(sites), data_(sites * kCloverPerSite) {}

  std::size_t sites() const noexcept { return sites_; }
  const Complex* site(std::size_t x) const { return data_.data() + x * kCloverPerSite; }
  Complex* site(std::size_t x) { return data_.data() + x * kCloverPerSite; }
  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  /// Full Hermitian 6x6 block (row-major) expanded from the packed triangle.
  std::array<Complex, 36> block(std::size_t x, int which) const;

 private:
  std::size_t sites_ = 0;
  std::vector<Complex> data_;
};

enum class GaugeMode : std::uint8_t { unit, random };
enum class CloverMode : std::uint8_t { zero, random_hermitian };

GaugeField gen_gauge(const LatticeGeometry& geom, GaugeMode mode, std::uint64_t seed);
CloverField gen_clover(const LatticeGeometry& geom, CloverMode mode, double scale,
                       std::uint64_t seed);

/// Random SU(3) matrix: Gram-Schmidt on Gaussian columns, then the
/// determinant phase is divided out.
ColorMatrix random_su3(Rng& rng);

struct LinkDefects {
  double max_unitarity = 0.0;   // max |(U^dagger U - I)_ij|
  double max_det_error = 0.0;   // max |det U - 1|
};
LinkDefects check_links(const GaugeField& u);

Complex determinant(const ColorMatrix& m);

}  // namespace lqml
