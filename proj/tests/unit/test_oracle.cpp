#include "doctest.h"
#include "lqml/errors.hpp"
#include "lqml/oracle.hpp"
#include "support.hpp"

using namespace lqml;

TEST_CASE("free-field oracle maps constants to m0 times themselves") {
  const auto p = test::free_problem({2, 4, 2, 2}, 0.3);
  const auto d = oracle::assemble_dirac(p.geom, p.gauge, p.clover, p.params);
  oracle::DenseVector v(d.rows());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = Complex(1.0 + k % 12, -(k % 12) * 0.5);
  CHECK((d * v - 0.3 * v).norm() <= 1e-13 * v.norm());
}

TEST_CASE("stencil sparsity") {
  // 2^4: the forward and backward neighbours coincide, so one self block plus 4 neighbours
  const auto p2 = test::random_problem({2, 2, 2, 2});
  const auto d2 = oracle::assemble_dirac(p2.geom, p2.gauge, p2.clover, p2.params);
  const auto p4 = test::random_problem({4, 4, 4, 2});
  const auto d4 = oracle::assemble_dirac(p4.geom, p4.gauge, p4.clover, p4.params);
  for (std::size_t x : {0u, 5u, 11u}) {
    CHECK(oracle::nonzero_blocks_in_row(d2, x, p2.geom.n_sites()) == 5);
    CHECK(oracle::nonzero_blocks_in_row(d4, x, p4.geom.n_sites()) == 8);  // t extent 2
  }
}

TEST_CASE("dense round trips") {
  const auto v = test::random_spinor(16, 3, Layout::row_major, 4);
  BlockSpinorField w(16, 12, v.policy());
  for (int i = 0; i < 3; ++i) oracle::from_dense(oracle::to_dense(v, i), i, w);
  CHECK(test::bitwise_equal(v, w));
  CHECK(oracle::to_dense(v, 1)(12 * 3 + 3 * 2 + 1) == v.at(3, 7, 1));
}

TEST_CASE("parity blocks tile the operator") {
  const auto p = test::random_problem({2, 2, 2, 2});
  const auto d = oracle::assemble_dirac(p.geom, p.gauge, p.clover, p.params);
  const auto ee = oracle::parity_block(d, p.geom, Parity::even, Parity::even);
  const auto eo = oracle::parity_block(d, p.geom, Parity::even, Parity::odd);
  CHECK(ee.rows() == 96);
  // even-even is block diagonal
  const double diag = (4.0 + p.params.m0);
  CHECK(std::abs(ee(0, 0).real() - diag) <= 1.0);
  CHECK(std::abs(ee(0, 12)) == 0.0);
  CHECK(eo.norm() > 0.0);
}

TEST_CASE("dense solve rejects singular systems") {
  oracle::DenseMatrix a = oracle::DenseMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  CHECK_THROWS_AS(oracle::dense_solve(a, oracle::DenseMatrix::Ones(3, 1)), NumericalError);
  a = oracle::DenseMatrix::Identity(3, 3) * 2.0;
  CHECK((oracle::dense_solve(a, oracle::DenseMatrix::Ones(3, 1)).array() - 0.5).abs().maxCoeff() ==
        0.0);
}

TEST_CASE("oversized lattices are refused") {
  LatticeGeometry g({8, 8, 8, 8});
  GaugeField u = gen_gauge(g, GaugeMode::unit, 0);
  CloverField c = gen_clover(g, CloverMode::zero, 0.0, 0);
  CHECK_THROWS_AS(oracle::assemble_dirac(g, u, c, {}), ValidationError);
}
