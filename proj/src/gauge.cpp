#include "lqml/gauge.hpp"

#include <algorithm>
#include <cmath>

#include "lqml/rng.hpp"

namespace lqml {

std::array<Complex, 36> CloverField::block(std::size_t x, int which) const {
  const Complex* tri = site(x) + which * kCloverTriangle;
  std::array<Complex, 36> m{};
  for (int r = 0; r < kCloverBlockSize; ++r) {
    for (int c = 0; c <= r; ++c) {
      const Complex v = tri[clover_tri_index(r, c)];
      m[r * 6 + c] = v;
      m[c * 6 + r] = std::conj(v);
    }
  }
  return m;
}

Complex determinant(const ColorMatrix& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

ColorMatrix random_su3(Rng& rng) {
  ColorMatrix m{};
  for (auto& v : m) v = rng.complex_gaussian();

  // modified Gram-Schmidt on columns
  for (int c = 0; c < 3; ++c) {
    for (int p = 0; p < c; ++p) {
      Complex proj{};
      for (int r = 0; r < 3; ++r) proj += std::conj(m[r * 3 + p]) * m[r * 3 + c];
      for (int r = 0; r < 3; ++r) m[r * 3 + c] -= proj * m[r * 3 + p];
    }
    double nrm = 0.0;
    for (int r = 0; r < 3; ++r) nrm += std::norm(m[r * 3 + c]);
    nrm = std::sqrt(nrm);
    for (int r = 0; r < 3; ++r) m[r * 3 + c] /= nrm;
  }

  const Complex det = determinant(m);
  const Complex phase = std::polar(1.0, -std::arg(det) / 3.0);
  for (auto& v : m) v *= phase;
  return m;
}

GaugeField gen_gauge(const LatticeGeometry& geom, GaugeMode mode, std::uint64_t seed) {
  GaugeField u(geom.n_sites());
  if (mode == GaugeMode::unit) {
    for (std::size_t x = 0; x < geom.n_sites(); ++x)
      for (int mu = 0; mu < kDims; ++mu) {
        Complex* l = u.link(x, mu);
        l[0] = l[4] = l[8] = 1.0;
      }
    return u;
  }
  Rng rng(seed);
  for (std::size_t x = 0; x < geom.n_sites(); ++x)
    for (int mu = 0; mu < kDims; ++mu) {
      const ColorMatrix m = random_su3(rng);
      std::copy(m.begin(), m.end(), u.link(x, mu));
    }
  return u;
}

CloverField gen_clover(const LatticeGeometry& geom, CloverMode mode, double scale,
                       std::uint64_t seed) {
  CloverField c(geom.n_sites());
  if (mode == CloverMode::zero) return c;
  Rng rng(seed);
  for (std::size_t x = 0; x < geom.n_sites(); ++x) {
    for (int blk = 0; blk < 2; ++blk) {
      std::array<Complex, 36> g{};
      for (auto& v : g) v = rng.complex_gaussian();
      Complex* tri = c.site(x) + blk * kCloverTriangle;
      for (int r = 0; r < kCloverBlockSize; ++r) {
        for (int col = 0; col <= r; ++col) {
          Complex h = 0.5 * (g[r * 6 + col] + std::conj(g[col * 6 + r])) * scale;
          if (r == col) h = {h.real(), 0.0};
          tri[clover_tri_index(r, col)] = h;
        }
      }
    }
  }
  return c;
}

LinkDefects check_links(const GaugeField& u) {
  LinkDefects d;
  for (std::size_t x = 0; x < u.sites(); ++x) {
    for (int mu = 0; mu < kDims; ++mu) {
      const Complex* l = u.link(x, mu);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          Complex s{};
          for (int r = 0; r < 3; ++r) s += std::conj(l[r * 3 + i]) * l[r * 3 + j];
          if (i == j) s -= 1.0;
          d.max_unitarity = std::max(d.max_unitarity, std::abs(s));
        }
      }
      ColorMatrix m;
      std::copy(l, l + 9, m.begin());
      d.max_det_error = std::max(d.max_det_error, std::abs(determinant(m) - 1.0));
    }
  }
  return d;
}

}  // namespace lqml
