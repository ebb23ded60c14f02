#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "lqml/field.hpp"
#include "lqml/gauge.hpp"
#include "lqml/geometry.hpp"
#include "lqml/wilson_dirac.hpp"

namespace lqml::test {

struct Problem {
  LatticeGeometry geom;
  GaugeField gauge;
  CloverField clover;
  DiracParams params;
};

inline Problem random_problem(Extents dims, std::uint64_t seed = 7, double m0 = -0.5,
                              double clover_scale = 0.1) {
  LatticeGeometry g(dims);
  GaugeField u = gen_gauge(g, GaugeMode::random, seed);
  CloverField c = gen_clover(g, CloverMode::random_hermitian, clover_scale, seed + 1);
  return {g, std::move(u), std::move(c), DiracParams{m0}};
}

inline Problem free_problem(Extents dims, double m0 = -0.5) {
  LatticeGeometry g(dims);
  GaugeField u = gen_gauge(g, GaugeMode::unit, 0);
  CloverField c = gen_clover(g, CloverMode::zero, 0.0, 0);
  return {g, std::move(u), std::move(c), DiracParams{m0}};
}

inline WilsonDirac make_dirac(const Problem& p) {
  return WilsonDirac(p.geom, p.gauge, p.clover, p.params);
}

inline BlockSpinorField random_spinor(std::size_t sites, int b, Layout l, std::uint64_t seed) {
  BlockSpinorField v(sites, kSpinorComponents, {l, b});
  fill_gaussian(v, seed);
  return v;
}

/// max |a - b| / max |b| over all entries, layout-independent.
inline double rel_diff(const BlockSpinorField& a, const BlockSpinorField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t x = 0; x < a.sites(); ++x)
    for (int k = 0; k < a.components(); ++k)
      for (int i = 0; i < a.block(); ++i) {
        num = std::max(num, std::abs(a.at(x, k, i) - b.at(x, k, i)));
        den = std::max(den, std::abs(b.at(x, k, i)));
      }
  return den > 0 ? num / den : num;
}

inline bool bitwise_equal(const BlockSpinorField& a, const BlockSpinorField& b) {
  if (!a.same_shape(b)) return false;
  auto da = a.data();
  auto db = b.data();
  return std::equal(da.begin(), da.end(), db.begin());
}

}  // namespace lqml::test
