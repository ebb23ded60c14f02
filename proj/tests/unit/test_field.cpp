#include <numeric>

#include "doctest.h"
#include "lqml/errors.hpp"
#include "lqml/field.hpp"
#include "support.hpp"

using namespace lqml;

TEST_CASE("layout offsets") {
  // column-major: rhs-major blocks, row-major: component-major blocks
  CHECK(block_offset<Layout::column_major>(3, 2, 12, 4) == 2u * 12 + 3);
  CHECK(block_offset<Layout::row_major>(3, 2, 12, 4) == 3u * 4 + 2);
  const LayoutPolicy p{Layout::row_major, 4};
  CHECK(element_offset(p, 12, 5, 3, 2) == 5u * 48 + 14);
  CHECK_THROWS_AS(element_offset(p, 12, 0, 12, 0), std::out_of_range);
  CHECK_THROWS_AS(element_offset(p, 12, 0, 0, 4), std::out_of_range);
}

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(BlockSpinorField(4, 12, {Layout::column_major, 0}), ValidationError);
  CHECK_THROWS_AS(layout_from_int(3), ValidationError);
  CHECK(layout_from_int(2) == Layout::row_major);
}

TEST_CASE("fill_gaussian content is layout independent") {
  const auto a = test::random_spinor(16, 3, Layout::column_major, 11);
  const auto b = test::random_spinor(16, 3, Layout::row_major, 11);
  for (std::size_t x = 0; x < 16; ++x)
    for (int k = 0; k < 12; ++k)
      for (int i = 0; i < 3; ++i) CHECK(a.at(x, k, i) == b.at(x, k, i));
}

TEST_CASE("convert_layout round trip and b = 1 identity") {
  const auto a = test::random_spinor(8, 4, Layout::column_major, 3);
  const auto r = convert_layout(a, Layout::row_major);
  CHECK(r.layout() == Layout::row_major);
  CHECK(test::rel_diff(r, a) == 0.0);
  CHECK(test::bitwise_equal(convert_layout(r, Layout::column_major), a));

  // with a single rhs both layouts share the same memory order
  const auto s = test::random_spinor(8, 1, Layout::column_major, 4);
  const auto t = convert_layout(s, Layout::row_major);
  CHECK(std::equal(s.data().begin(), s.data().end(), t.data().begin()));
}

TEST_CASE("extract and insert rhs columns") {
  auto v = test::random_spinor(8, 3, Layout::row_major, 5);
  const auto c1 = extract_rhs(v, 1);
  CHECK(c1.block() == 1);
  for (std::size_t x = 0; x < 8; ++x)
    for (int k = 0; k < 12; ++k) CHECK(c1.at(x, k, 0) == v.at(x, k, 1));
  BlockSpinorField w(8, 12, {Layout::row_major, 3});
  insert_rhs(c1, 2, w);
  CHECK(w.at(7, 11, 2) == v.at(7, 11, 1));
  CHECK(w.at(7, 11, 1) == Complex{});
}

TEST_CASE("axpy, scale and norms act per rhs") {
  for (Layout l : {Layout::column_major, Layout::row_major}) {
    auto x = test::random_spinor(8, 3, l, 21);
    auto y = test::random_spinor(8, 3, l, 22);
    const auto y0 = y;
    const std::vector<Complex> alpha = {{1.0, 0.0}, {0.0, 2.0}, {-0.5, 0.25}};
    block_axpy(alpha, x, y);
    for (std::size_t s = 0; s < 8; ++s)
      for (int k = 0; k < 12; ++k)
        for (int i = 0; i < 3; ++i)
          CHECK(std::abs(y.at(s, k, i) - (y0.at(s, k, i) + alpha[i] * x.at(s, k, i))) < 1e-15);

    block_scale(alpha, x);
    const auto n = block_norms(x);
    const auto n0 = block_norms(test::random_spinor(8, 3, l, 21));
    for (int i = 0; i < 3; ++i) CHECK(n[i] == doctest::Approx(std::abs(alpha[i]) * n0[i]).epsilon(1e-14));
  }
}

TEST_CASE("block_dot strategies agree with a direct sum") {
  for (int b : {1, 3, 8, 12}) {
    for (Layout l : {Layout::column_major, Layout::row_major}) {
      const auto w = test::random_spinor(10, b, l, 31);
      const auto e = test::random_spinor(10, b, l, 32);
      const auto naive = block_dot(w, e, DotStrategy::naive);
      const auto deferred = block_dot(w, e, DotStrategy::deferred_separation);
      for (int i = 0; i < b; ++i) {
        Complex ref{};
        for (std::size_t x = 0; x < 10; ++x)
          for (int k = 0; k < 12; ++k) ref += std::conj(w.at(x, k, i)) * e.at(x, k, i);
        CHECK(std::abs(naive[i] - ref) <= 1e-12 * std::abs(ref));
        CHECK(std::abs(deferred[i] - ref) <= 1e-12 * std::abs(ref));
      }
    }
  }
}

TEST_CASE("shape mismatches are rejected") {
  auto x = test::random_spinor(8, 2, Layout::column_major, 1);
  auto y = test::random_spinor(8, 2, Layout::row_major, 2);
  const std::vector<Complex> alpha(2, 1.0);
  CHECK_THROWS_AS(block_axpy(alpha, x, y), ValidationError);
  CHECK_THROWS_AS(block_dot(x, y), ValidationError);
  const std::vector<Complex> short_alpha(1, 1.0);
  CHECK_THROWS_AS(block_scale(short_alpha, x), ValidationError);
}
