#pragma once

// Per-site building blocks of the Wilson-Dirac stencil. Every kernel handles
// the b right-hand sides of one site in a single call (the rhs loop is fused
// into the site loop). The Tally parameter counts floating-point work when
// instrumented and compiles away otherwise:
//   complex mul = 6 flops, complex add/sub = 2, real*complex = 2.

#include <array>
#include <cstdint>
#include <type_traits>

#include "lqml/field.hpp"
#include "lqml/gauge.hpp"
#include "lqml/projectors.hpp"

namespace lqml::detail {

struct NoTally {
  static constexpr void cmul(int) {}
  static constexpr void cadd(int) {}
  static constexpr void rmul(int) {}
};

struct FlopTally {
  std::uint64_t flops = 0;
  void cmul(int n) { flops += 6u * static_cast<unsigned>(n); }
  void cadd(int n) { flops += 2u * static_cast<unsigned>(n); }
  void rmul(int n) { flops += 2u * static_cast<unsigned>(n); }
};

/// Where a site's rows come from: every site, or an explicit list (parity subsets).
struct SiteList {
  const std::uint32_t* list = nullptr;
  std::size_t count = 0;
  std::size_t operator[](std::size_t i) const { return list ? list[i] : i; }
};

/// Calls f with std::integral_constant<Layout, l> so kernels can be
/// instantiated per layout.
template <class F>
void with_layout(Layout l, F&& f) {
  if (l == Layout::column_major) {
    f(std::integral_constant<Layout, Layout::column_major>{});
  } else {
    f(std::integral_constant<Layout, Layout::row_major>{});
  }
}

inline ColorMatrix dagger(const Complex* u) {
  ColorMatrix d{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) d[r * 3 + c] = std::conj(u[c * 3 + r]);
  return d;
}

/// eta = diag * psi - C psi on one site (s = 12).
template <Layout L, class T>
void self_coupling_site(double diag, const CloverField& clover, std::size_t x, const Complex* psi,
                        Complex* eta, int b, T& t) {
  constexpr int s = kSpinorComponents;
  for (int blk = 0; blk < 2; ++blk) {
    const std::array<Complex, 36> m = clover.block(x, blk);
    const int k0 = blk * 6;
    if constexpr (L == Layout::column_major) {
      for (int i = 0; i < b; ++i) {
        const Complex* in = psi + i * s + k0;
        Complex* out = eta + i * s + k0;
        for (int r = 0; r < 6; ++r) {
          Complex acc = diag * in[r];
          t.rmul(1);
          for (int c = 0; c < 6; ++c) {
            acc -= m[r * 6 + c] * in[c];
            t.cmul(1);
            t.cadd(1);
          }
          out[r] = acc;
        }
      }
    } else {
      for (int r = 0; r < 6; ++r) {
        Complex* out = eta + (k0 + r) * b;
        const Complex* in_r = psi + (k0 + r) * b;
        for (int i = 0; i < b; ++i) out[i] = diag * in_r[i];
        t.rmul(b);
        for (int c = 0; c < 6; ++c) {
          const Complex a = m[r * 6 + c];
          const Complex* in_c = psi + (k0 + c) * b;
          for (int i = 0; i < b; ++i) out[i] -= a * in_c[i];
          t.cmul(b);
          t.cadd(b);
        }
      }
    }
  }
}

/// h = compressed (pi (x) I3) psi, h has 6 components.
template <Layout L, class T>
void compress_site(const HalfSpinorMap& map, const Complex* psi, Complex* h, int b, T& t) {
  constexpr int s = kSpinorComponents;
  constexpr int hs = kHalfSpinorComponents;
  for (int sp = 0; sp < 2; ++sp) {
    const Complex coeff = map.compress_coeff[sp];
    for (int c = 0; c < 3; ++c) {
      const int kin = sp * 3 + c;
      const int kpart = map.partner[sp] * 3 + c;
      const int kout = sp * 3 + c;
      for (int i = 0; i < b; ++i) {
        h[block_offset<L>(kout, i, hs, b)] =
            0.5 * (psi[block_offset<L>(kin, i, s, b)] + coeff * psi[block_offset<L>(kpart, i, s, b)]);
      }
      t.cmul(b);
      t.cadd(b);
      t.rmul(b);
    }
  }
}

/// out = M applied to both 3-color vectors of a half spinor (s = 6).
template <Layout L, class T>
void color_mult_site(const Complex* m, const Complex* in, Complex* out, int b, T& t) {
  constexpr int hs = kHalfSpinorComponents;
  if constexpr (L == Layout::column_major) {
    // one matrix-vector product per rhs
    for (int i = 0; i < b; ++i) {
      const Complex* v = in + i * hs;
      Complex* o = out + i * hs;
      for (int sp = 0; sp < 2; ++sp) {
        for (int r = 0; r < 3; ++r) {
          o[sp * 3 + r] = m[r * 3] * v[sp * 3] + m[r * 3 + 1] * v[sp * 3 + 1] +
                          m[r * 3 + 2] * v[sp * 3 + 2];
          t.cmul(3);
          t.cadd(2);
        }
      }
    }
  } else {
    // broadcast one matrix entry, stream over the rhs row
    for (int sp = 0; sp < 2; ++sp) {
      for (int r = 0; r < 3; ++r) {
        Complex* o = out + (sp * 3 + r) * b;
        const Complex a0 = m[r * 3];
        const Complex* v0 = in + (sp * 3) * b;
        for (int i = 0; i < b; ++i) o[i] = a0 * v0[i];
        t.cmul(b);
        for (int c = 1; c < 3; ++c) {
          const Complex a = m[r * 3 + c];
          const Complex* v = in + (sp * 3 + c) * b;
          for (int i = 0; i < b; ++i) o[i] += a * v[i];
          t.cmul(b);
          t.cadd(b);
        }
      }
    }
  }
}

/// eta -= reconstruct(h): upper spins directly, lower spins via the expansion map.
template <Layout L, class T>
void expand_subtract_site(const HalfSpinorMap& map, const Complex* h, Complex* eta, int b, T& t) {
  constexpr int s = kSpinorComponents;
  constexpr int hs = kHalfSpinorComponents;
  for (int k = 0; k < hs; ++k) {
    for (int i = 0; i < b; ++i) eta[block_offset<L>(k, i, s, b)] -= h[block_offset<L>(k, i, hs, b)];
    t.cadd(b);
  }
  for (int lo = 0; lo < 2; ++lo) {
    const Complex coeff = map.expand_coeff[lo];
    const int src = map.expand_source[lo];
    for (int c = 0; c < 3; ++c) {
      const int kout = (2 + lo) * 3 + c;
      const int kin = src * 3 + c;
      for (int i = 0; i < b; ++i)
        eta[block_offset<L>(kout, i, s, b)] -= coeff * h[block_offset<L>(kin, i, hs, b)];
      t.cmul(b);
      t.cadd(b);
    }
  }
}

/// chi = U^dagger (compressed pi^+ psi), stored by the caller at x + mu-hat.
template <Layout L, class T>
void project_plus_udag_site(const HalfSpinorMap& map, const Complex* u, const Complex* psi,
                            Complex* scratch, Complex* chi, int b, T& t) {
  compress_site<L>(map, psi, scratch, b, t);
  const ColorMatrix ud = dagger(u);
  color_mult_site<L>(ud.data(), scratch, chi, b, t);
}

/// eta -= reconstruct(U lambda(x + mu-hat)).
template <Layout L, class T>
void hop_minus_site(const HalfSpinorMap& map, const Complex* u, const Complex* lambda_nb,
                    Complex* scratch, Complex* eta, int b, T& t) {
  color_mult_site<L>(u, lambda_nb, scratch, b, t);
  expand_subtract_site<L>(map, scratch, eta, b, t);
}

}  // namespace lqml::detail
