#include "doctest.h"
#include "lqml/projectors.hpp"
#include "lqml/rng.hpp"

using namespace lqml;

namespace {

SpinMatrix mul(const SpinMatrix& a, const SpinMatrix& b) {
  SpinMatrix c{};
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k)
      for (int col = 0; col < 4; ++col) c[r][col] += a[r][k] * b[k][col];
  return c;
}

double dist(const SpinMatrix& a, const SpinMatrix& b) {
  double d = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) d = std::max(d, std::abs(a[r][c] - b[r][c]));
  return d;
}

SpinMatrix identity() {
  SpinMatrix m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

}  // namespace

TEST_CASE("gamma matrices satisfy the Clifford algebra") {
  const auto& t = ProjectorTable::chiral();
  for (int mu = 0; mu < 4; ++mu) {
    const SpinMatrix& g = t.gamma(mu);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) CHECK(g[r][c] == std::conj(g[c][r]));
    CHECK(dist(mul(g, g), identity()) < 1e-15);
    for (int nu = mu + 1; nu < 4; ++nu) {
      SpinMatrix ac = mul(g, t.gamma(nu));
      const SpinMatrix ba = mul(t.gamma(nu), g);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) ac[r][c] += ba[r][c];
      CHECK(dist(ac, SpinMatrix{}) < 1e-15);
    }
  }
}

TEST_CASE("projectors are complementary idempotents") {
  const auto& t = ProjectorTable::chiral();
  for (int mu = 0; mu < 4; ++mu) {
    const SpinMatrix p = t.projector(mu, ProjSign::plus);
    const SpinMatrix m = t.projector(mu, ProjSign::minus);
    CHECK(dist(mul(p, p), p) < 1e-15);
    CHECK(dist(mul(m, m), m) < 1e-15);
    CHECK(dist(mul(p, m), SpinMatrix{}) < 1e-15);
    SpinMatrix sum{};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) sum[r][c] = p[r][c] + m[r][c];
    CHECK(dist(sum, identity()) < 1e-15);
    Complex trace{};
    for (int i = 0; i < 4; ++i) trace += p[i][i];
    CHECK(std::abs(trace - 2.0) < 1e-15);  // rank 2
  }
}

TEST_CASE("compress then reconstruct reproduces the dense projection") {
  const auto& t = ProjectorTable::chiral();
  Rng rng(3);
  for (int mu = 0; mu < 4; ++mu) {
    for (ProjSign sign : {ProjSign::plus, ProjSign::minus}) {
      std::array<Complex, 4> psi{};
      for (auto& z : psi) z = rng.complex_gaussian();
      const HalfSpinorMap& m = t.map(mu, sign);
      std::array<Complex, 2> h{};
      for (int s = 0; s < 2; ++s) h[s] = 0.5 * (psi[s] + m.compress_coeff[s] * psi[m.partner[s]]);
      std::array<Complex, 4> out{h[0], h[1], m.expand_coeff[0] * h[m.expand_source[0]],
                                 m.expand_coeff[1] * h[m.expand_source[1]]};
      const SpinMatrix p = t.projector(mu, sign);
      for (int r = 0; r < 4; ++r) {
        Complex ref{};
        for (int c = 0; c < 4; ++c) ref += p[r][c] * psi[c];
        CHECK(std::abs(out[r] - ref) < 1e-14);
      }
    }
  }
}
