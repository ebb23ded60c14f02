#include "lqml/oracle.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "lqml/errors.hpp"

namespace lqml::oracle {

namespace {

using Mat4 = Eigen::Matrix4cd;
using Mat3 = Eigen::Matrix3cd;
using Mat12 = Eigen::Matrix<std::complex<double>, 12, 12>;

// Gamma matrices written out directly, not taken from ProjectorTable.
std::array<Mat4, 4> gammas() {
  const Complex i(0.0, 1.0);
  std::array<Mat4, 4> g;
  for (auto& m : g) m.setZero();
  // gamma_0: A = I
  g[0](0, 2) = 1.0; g[0](1, 3) = 1.0; g[0](2, 0) = 1.0; g[0](3, 1) = 1.0;
  // gamma_1: A = -i sigma_1
  g[1](0, 3) = -i; g[1](1, 2) = -i; g[1](2, 1) = i; g[1](3, 0) = i;
  // gamma_2: A = -i sigma_2 = [[0,-1],[1,0]]
  g[2](0, 3) = -1.0; g[2](1, 2) = 1.0; g[2](2, 1) = 1.0; g[2](3, 0) = -1.0;
  // gamma_3: A = -i sigma_3 = diag(-i, i)
  g[3](0, 2) = -i; g[3](1, 3) = i; g[3](2, 0) = i; g[3](3, 1) = -i;
  return g;
}

Mat3 link(const GaugeField& u, std::size_t x, int mu) {
  const Complex* p = u.link(x, mu);
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = p[r * 3 + c];
  return m;
}

Mat12 kron(const Mat4& s, const Mat3& c) {
  Mat12 k;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) k.block<3, 3>(3 * a, 3 * b) = s(a, b) * c;
  return k;
}

void check_size(std::size_t sites) {
  const auto n = static_cast<Eigen::Index>(12 * sites);
  if (n > kMaxDenseDim) {
    throw ValidationError("dense oracle: dimension " + std::to_string(n) + " exceeds guard " +
                          std::to_string(kMaxDenseDim));
  }
}

}  // namespace

DenseMatrix assemble_dirac(const LatticeGeometry& geom, const GaugeField& u,
                           const CloverField& c, const DiracParams& params) {
  const std::size_t ns = geom.n_sites();
  check_size(ns);
  const auto n = static_cast<Eigen::Index>(12 * ns);
  DenseMatrix d = DenseMatrix::Zero(n, n);
  const auto g = gammas();
  const Mat4 id = Mat4::Identity();

  for (std::size_t x = 0; x < ns; ++x) {
    const auto row = static_cast<Eigen::Index>(12 * x);
    // self coupling: (4 + m0) - C(x), clover blocks on spins {0,1} and {2,3}
    d.block(row, row, 12, 12) += params.diagonal() * Mat12::Identity();
    for (int blk = 0; blk < 2; ++blk) {
      for (int r = 0; r < 6; ++r) {
        for (int col = 0; col <= r; ++col) {
          const Complex v = c.site(x)[blk * 21 + r * (r + 1) / 2 + col];
          d(row + 6 * blk + r, row + 6 * blk + col) -= v;
          if (col != r) d(row + 6 * blk + col, row + 6 * blk + r) -= std::conj(v);
        }
      }
    }
    const SiteCoord cx = geom.site_coord(x);
    for (int mu = 0; mu < 4; ++mu) {
      // forward neighbor: -(I + gamma)/2 (x) U_mu(x)
      SiteCoord f = cx;
      f[mu] = (f[mu] + 1) % geom.extent(mu);
      const std::size_t xf = geom.site_index(f);
      d.block(row, static_cast<Eigen::Index>(12 * xf), 12, 12) -=
          kron(0.5 * (id + g[mu]), link(u, x, mu));
      // backward neighbor: -(I - gamma)/2 (x) U_mu(x - mu)^dagger
      SiteCoord bk = cx;
      bk[mu] = (bk[mu] - 1 + geom.extent(mu)) % geom.extent(mu);
      const std::size_t xb = geom.site_index(bk);
      d.block(row, static_cast<Eigen::Index>(12 * xb), 12, 12) -=
          kron(0.5 * (id - g[mu]), link(u, xb, mu).adjoint());
    }
  }
  return d;
}

DenseMatrix parity_block(const DenseMatrix& d, const LatticeGeometry& geom, Parity row,
                         Parity col) {
  std::vector<std::size_t> rs, cs;
  for (std::size_t x = 0; x < geom.n_sites(); ++x) {
    if (geom.site_parity(x) == row) rs.push_back(x);
    if (geom.site_parity(x) == col) cs.push_back(x);
  }
  DenseMatrix out(static_cast<Eigen::Index>(12 * rs.size()),
                  static_cast<Eigen::Index>(12 * cs.size()));
  for (std::size_t a = 0; a < rs.size(); ++a)
    for (std::size_t b = 0; b < cs.size(); ++b)
      out.block(12 * a, 12 * b, 12, 12) = d.block(12 * rs[a], 12 * cs[b], 12, 12);
  return out;
}

DenseMatrix assemble_schur(const LatticeGeometry& geom, const GaugeField& u,
                           const CloverField& c, const DiracParams& params) {
  const DenseMatrix d = assemble_dirac(geom, u, c, params);
  const DenseMatrix dee = parity_block(d, geom, Parity::even, Parity::even);
  const DenseMatrix deo = parity_block(d, geom, Parity::even, Parity::odd);
  const DenseMatrix doe = parity_block(d, geom, Parity::odd, Parity::even);
  const DenseMatrix doo = parity_block(d, geom, Parity::odd, Parity::odd);
  return dee - deo * dense_solve(doo, doe);
}

DenseMatrix dense_solve(const DenseMatrix& a, const DenseMatrix& rhs) {
  if (a.rows() != a.cols() || a.rows() != rhs.rows()) {
    throw ValidationError("dense_solve: shape mismatch");
  }
  Eigen::PartialPivLU<DenseMatrix> lu(a);
  // The rcond estimator misses exactly vanishing pivots, so look at them too.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = a.rows() == 0 ? 1.0 : pivots.minCoeff() / pivots.maxCoeff();
  const double rcond = std::min(lu.rcond(), pivot_ratio);
  if (!(rcond > 1e-12)) {
    throw NumericalError("dense_solve: matrix is singular to working precision (rcond " +
                         std::to_string(rcond) + ")");
  }
  return lu.solve(rhs);
}

DenseVector dense_lstsq(const DenseMatrix& a, const DenseVector& g) {
  if (a.rows() != g.rows()) throw ValidationError("dense_lstsq: shape mismatch");
  return a.householderQr().solve(g);
}

DenseVector to_dense(const BlockSpinorField& v, int i) {
  if (v.components() != 12) throw ValidationError("to_dense: expects a spinor field");
  DenseVector d(static_cast<Eigen::Index>(12 * v.sites()));
  for (std::size_t x = 0; x < v.sites(); ++x)
    for (int k = 0; k < 12; ++k) d(static_cast<Eigen::Index>(12 * x + k)) = v.at(x, k, i);
  return d;
}

void from_dense(const DenseVector& d, int i, BlockSpinorField& v) {
  if (d.size() != static_cast<Eigen::Index>(12 * v.sites())) {
    throw ValidationError("from_dense: length mismatch");
  }
  for (std::size_t x = 0; x < v.sites(); ++x)
    for (int k = 0; k < 12; ++k) v.at(x, k, i) = d(static_cast<Eigen::Index>(12 * x + k));
}

DenseVector to_dense_parity(const BlockSpinorField& full, const LatticeGeometry& geom, Parity p,
                            int i) {
  std::vector<std::size_t> xs;
  for (std::size_t x = 0; x < geom.n_sites(); ++x)
    if (geom.site_parity(x) == p) xs.push_back(x);
  DenseVector d(static_cast<Eigen::Index>(12 * xs.size()));
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (int k = 0; k < 12; ++k) d(static_cast<Eigen::Index>(12 * a + k)) = full.at(xs[a], k, i);
  return d;
}

int nonzero_blocks_in_row(const DenseMatrix& d, std::size_t site, std::size_t n_sites) {
  int count = 0;
  for (std::size_t y = 0; y < n_sites; ++y) {
    if (d.block(12 * site, 12 * y, 12, 12).cwiseAbs().maxCoeff() > 0.0) ++count;
  }
  return count;
}

}  // namespace lqml::oracle
