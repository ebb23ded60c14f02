#include "lqml/projectors.hpp"

#include <stdexcept>

namespace lqml {

namespace {

using Block2 = std::array<std::array<Complex, 2>, 2>;

SpinMatrix chiral_gamma(const Block2& a) {
  SpinMatrix g{};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      g[r][2 + c] = a[r][c];
      g[2 + r][c] = std::conj(a[c][r]);
    }
  }
  return g;
}

// Single nonzero column of row r in the off-diagonal block.
int partner_column(const SpinMatrix& g, int r) {
  int found = -1;
  for (int c = 0; c < 4; ++c) {
    if (g[r][c] != Complex{}) {
      if (found >= 0) throw std::logic_error("gamma matrix row has more than one nonzero");
      found = c;
    }
  }
  if (found < 0) throw std::logic_error("gamma matrix row is zero");
  return found;
}

HalfSpinorMap build_map(const SpinMatrix& g, double sigma) {
  // pi = (I + sigma*gamma)/2; sigma = +1 for pi^-, -1 for pi^+.
  HalfSpinorMap m;
  for (int s = 0; s < 2; ++s) {
    m.partner[s] = partner_column(g, s);
    m.compress_coeff[s] = sigma * g[s][m.partner[s]];
  }
  for (int t = 0; t < 2; ++t) {
    m.expand_source[t] = partner_column(g, 2 + t);
    m.expand_coeff[t] = sigma * g[2 + t][m.expand_source[t]];
  }
  return m;
}

}  // namespace

const ProjectorTable& ProjectorTable::chiral() {
  static const ProjectorTable table;
  return table;
}

ProjectorTable::ProjectorTable() {
  const Complex i{0.0, 1.0};
  const Complex one{1.0, 0.0};
  const Complex zero{};
  const std::array<Block2, kDims> blocks = {{
      {{{one, zero}, {zero, one}}},     // I2
      {{{zero, -i}, {-i, zero}}},       // -i sigma_1
      {{{zero, -one}, {one, zero}}},    // -i sigma_2
      {{{-i, zero}, {zero, i}}},        // -i sigma_3
  }};
  for (int mu = 0; mu < kDims; ++mu) {
    gamma_[mu] = chiral_gamma(blocks[mu]);
    maps_[mu][static_cast<int>(ProjSign::plus)] = build_map(gamma_[mu], -1.0);
    maps_[mu][static_cast<int>(ProjSign::minus)] = build_map(gamma_[mu], +1.0);
  }
}

SpinMatrix ProjectorTable::projector(int mu, ProjSign sign) const {
  const double sigma = sign == ProjSign::plus ? -1.0 : 1.0;
  SpinMatrix p{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      p[r][c] = 0.5 * ((r == c ? 1.0 : 0.0) + sigma * gamma_[mu][r][c]);
    }
  }
  return p;
}

}  // namespace lqml
