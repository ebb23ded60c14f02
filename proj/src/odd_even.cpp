#include "lqml/odd_even.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirac_kernels.hpp"
#include "lqml/errors.hpp"

namespace lqml {

using detail::with_layout;

OeSplit::OeSplit(const LatticeGeometry& geom) : pos_(geom.n_sites()) {
  for (int mu = 0; mu < kDims; ++mu) {
    if (geom.extent(mu) % 2 != 0) {
      throw ValidationError("odd-even split needs even extents, got " + to_string(geom.dims()));
    }
  }
  for (std::size_t x = 0; x < geom.n_sites(); ++x) {
    auto& list = geom.site_parity(x) == Parity::even ? even_ : odd_;
    pos_[x] = static_cast<std::uint32_t>(list.size());
    list.push_back(static_cast<std::uint32_t>(x));
  }
}

BlockSpinorField OeSplit::extract(const BlockSpinorField& v, Parity p) const {
  if (v.sites() != n_sites()) throw ValidationError("OeSplit: field is not a full-lattice field");
  const auto& list = sites(p);
  BlockSpinorField half(list.size(), v.components(), v.policy());
  const std::size_t stride = v.site_stride();
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::copy_n(v.site_ptr(list[i]), stride, half.site_ptr(i));
  }
  return half;
}

std::pair<BlockSpinorField, BlockSpinorField> OeSplit::split(const BlockSpinorField& v) const {
  return {extract(v, Parity::even), extract(v, Parity::odd)};
}

void OeSplit::insert(const BlockSpinorField& half, Parity p, BlockSpinorField& full) const {
  const auto& list = sites(p);
  if (half.sites() != list.size() || full.sites() != n_sites() ||
      half.components() != full.components() || !(half.policy() == full.policy())) {
    throw ValidationError("OeSplit::insert: shape mismatch");
  }
  const std::size_t stride = half.site_stride();
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::copy_n(half.site_ptr(i), stride, full.site_ptr(list[i]));
  }
}

BlockSpinorField OeSplit::merge(const BlockSpinorField& even, const BlockSpinorField& odd) const {
  if (!even.same_shape(odd)) throw ValidationError("OeSplit::merge: halves differ in shape");
  BlockSpinorField full(n_sites(), even.components(), even.policy());
  insert(even, Parity::even, full);
  insert(odd, Parity::odd, full);
  return full;
}

double invert_block6(const std::array<Complex, 36>& a, std::array<Complex, 36>& inv) {
  constexpr int n = 6;
  std::array<Complex, 36> lu = a;
  std::array<int, n> perm{};
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int r = k + 1; r < n; ++r) {
      if (std::abs(lu[r * n + k]) > std::abs(lu[p * n + k])) p = r;
    }
    if (lu[p * n + k] == Complex{}) return std::numeric_limits<double>::infinity();
    if (p != k) {
      for (int c = 0; c < n; ++c) std::swap(lu[k * n + c], lu[p * n + c]);
      std::swap(perm[k], perm[p]);
    }
    const Complex piv = lu[k * n + k];
    for (int r = k + 1; r < n; ++r) {
      const Complex l = lu[r * n + k] / piv;
      lu[r * n + k] = l;
      for (int c = k + 1; c < n; ++c) lu[r * n + c] -= l * lu[k * n + c];
    }
  }

  // Solve column by column: P A = L U.
  for (int col = 0; col < n; ++col) {
    std::array<Complex, n> y{};
    for (int r = 0; r < n; ++r) {
      Complex s = perm[r] == col ? Complex{1.0} : Complex{};
      for (int c = 0; c < r; ++c) s -= lu[r * n + c] * y[c];
      y[r] = s;
    }
    for (int r = n - 1; r >= 0; --r) {
      Complex s = y[r];
      for (int c = r + 1; c < n; ++c) s -= lu[r * n + c] * y[c];
      y[r] = s / lu[r * n + r];
    }
    for (int r = 0; r < n; ++r) inv[r * n + col] = y[r];
  }

  auto norm1 = [](const std::array<Complex, 36>& m) {
    double best = 0.0;
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int r = 0; r < n; ++r) s += std::abs(m[r * n + c]);
      best = std::max(best, s);
    }
    return best;
  };
  const double cond = norm1(a) * norm1(inv);
  return std::isfinite(cond) ? cond : std::numeric_limits<double>::infinity();
}

SchurOperator::SchurOperator(const WilsonDirac& dirac, Parity keep)
    : dirac_(dirac), keep_(keep), split_(dirac.geometry()) {
  const auto& elim = split_.sites(eliminated());
  inv_.resize(elim.size() * 2);
  const double diag = dirac_.params().diagonal();
  for (std::size_t i = 0; i < elim.size(); ++i) {
    for (int blk = 0; blk < 2; ++blk) {
      std::array<Complex, 36> m = dirac_.clover().block(elim[i], blk);
      for (Complex& z : m) z = -z;
      for (int d = 0; d < 6; ++d) m[d * 6 + d] += diag;
      const double cond = invert_block6(m, inv_[2 * i + blk]);
      if (!(cond <= kSingularBlockThreshold)) throw SingularBlockError(elim[i], blk, cond);
    }
  }
}

const std::array<Complex, 36>& SchurOperator::block_inverse(std::size_t x, int which) const {
  if (dirac_.geometry().site_parity(x) != eliminated()) {
    throw ValidationError("block_inverse: site " + std::to_string(x) + " is not eliminated");
  }
  return inv_.at(2 * split_.position(x) + which);
}

void SchurOperator::apply_block_inverse(const BlockSpinorField& in, BlockSpinorField& out) const {
  if (!in.same_shape(out) || in.sites() != split_.n_sites() ||
      in.components() != kSpinorComponents) {
    throw ValidationError("apply_block_inverse: expects full spinor fields of equal shape");
  }
  const auto& elim = split_.sites(eliminated());
  const int b = in.block();
  constexpr int s = kSpinorComponents;
  with_layout(in.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel for schedule(static)
    for (long long n = 0; n < static_cast<long long>(elim.size()); ++n) {
      const Complex* src = in.site_ptr(elim[n]);
      Complex* dst = out.site_ptr(elim[n]);
      for (int blk = 0; blk < 2; ++blk) {
        const auto& m = inv_[2 * n + blk];
        const int k0 = blk * 6;
        for (int i = 0; i < b; ++i) {
          std::array<Complex, 6> v{};
          for (int c = 0; c < 6; ++c) v[c] = src[block_offset<L>(k0 + c, i, s, b)];
          for (int r = 0; r < 6; ++r) {
            Complex acc{};
            for (int c = 0; c < 6; ++c) acc += m[r * 6 + c] * v[c];
            dst[block_offset<L>(k0 + r, i, s, b)] = acc;
          }
        }
      }
    }
  });
}

void SchurOperator::apply(const BlockSpinorField& v, BlockSpinorField& w) const {
  if (v.sites() != split_.half_sites() || v.components() != kSpinorComponents) {
    throw ValidationError("SchurOperator::apply: expects a half-lattice spinor field");
  }
  const Parity k = keep_;
  const Parity e = eliminated();
  BlockSpinorField full(split_.n_sites(), kSpinorComponents, v.policy());
  split_.insert(v, k, full);
  BlockSpinorField t(split_.n_sites(), kSpinorComponents, v.policy());
  dirac_.apply_hopping(full, t, e);     // t_e = D_ek v
  apply_block_inverse(t, t);            // t_e = D_ee^-1 D_ek v
  BlockSpinorField u(split_.n_sites(), kSpinorComponents, v.policy());
  dirac_.apply_hopping(t, u, k);        // u_k = D_ke D_ee^-1 D_ek v
  dirac_.apply_site_diagonal(full, t, k);  // t_k = D_kk v
  const auto& list = split_.sites(k);
  if (!w.same_shape(v)) w = BlockSpinorField(v.sites(), kSpinorComponents, v.policy());
  const std::size_t stride = v.site_stride();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(list.size()); ++i) {
    const Complex* a = t.site_ptr(list[i]);
    const Complex* c = u.site_ptr(list[i]);
    Complex* o = w.site_ptr(i);
    for (std::size_t j = 0; j < stride; ++j) o[j] = a[j] - c[j];
  }
}

BlockSpinorField SchurOperator::apply(const BlockSpinorField& v) const {
  BlockSpinorField w(v.sites(), kSpinorComponents, v.policy());
  apply(v, w);
  return w;
}

BlockSpinorField SchurOperator::reduced_rhs(const BlockSpinorField& eta) const {
  if (eta.sites() != split_.n_sites() || eta.components() != kSpinorComponents) {
    throw ValidationError("reduced_rhs: expects a full-lattice spinor field");
  }
  BlockSpinorField t(split_.n_sites(), kSpinorComponents, eta.policy());
  apply_block_inverse(eta, t);  // t_e = D_ee^-1 eta_e
  BlockSpinorField u(split_.n_sites(), kSpinorComponents, eta.policy());
  dirac_.apply_hopping(t, u, keep_);
  BlockSpinorField out = split_.extract(eta, keep_);
  const auto& list = split_.sites(keep_);
  const std::size_t stride = eta.site_stride();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Complex* c = u.site_ptr(list[i]);
    Complex* o = out.site_ptr(i);
    for (std::size_t j = 0; j < stride; ++j) o[j] -= c[j];
  }
  return out;
}

BlockSpinorField SchurOperator::reconstruct(const BlockSpinorField& x_kept,
                                            const BlockSpinorField& eta) const {
  if (eta.sites() != split_.n_sites() || x_kept.sites() != split_.half_sites() ||
      !(eta.policy() == x_kept.policy())) {
    throw ValidationError("reconstruct: shape mismatch between x and eta");
  }
  const Parity e = eliminated();
  BlockSpinorField full(split_.n_sites(), kSpinorComponents, eta.policy());
  split_.insert(x_kept, keep_, full);
  BlockSpinorField t(split_.n_sites(), kSpinorComponents, eta.policy());
  dirac_.apply_hopping(full, t, e);  // t_e = D_ek x_k
  const auto& list = split_.sites(e);
  const std::size_t stride = eta.site_stride();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Complex* r = eta.site_ptr(list[i]);
    Complex* o = t.site_ptr(list[i]);
    for (std::size_t j = 0; j < stride; ++j) o[j] = r[j] - o[j];
  }
  apply_block_inverse(t, full);
  return full;
}

}  // namespace lqml
