#include <sstream>

#include "doctest.h"
#include "lqml/errors.hpp"
#include "lqml/snapshot.hpp"
#include "support.hpp"

using namespace lqml;

TEST_CASE("spinor snapshot round trip keeps layout and bits") {
  const Extents dims{2, 2, 2, 2};
  const auto v = test::random_spinor(16, 3, Layout::row_major, 8);
  std::stringstream ss;
  write_spinor(ss, dims, v);
  const SpinorSnapshot s = read_spinor(ss);
  CHECK(s.dims == dims);
  CHECK(s.field.layout() == Layout::row_major);
  CHECK(test::bitwise_equal(s.field, v));
}

TEST_CASE("gauge and clover snapshots round trip") {
  const auto p = test::random_problem({2, 2, 2, 2});
  std::stringstream gs, cs;
  write_gauge(gs, p.geom.dims(), p.gauge);
  write_clover(cs, p.geom.dims(), p.clover);
  const GaugeSnapshot g = read_gauge(gs);
  const CloverSnapshot c = read_clover(cs);
  CHECK(std::equal(g.field.data().begin(), g.field.data().end(), p.gauge.data().begin()));
  CHECK(std::equal(c.field.data().begin(), c.field.data().end(), p.clover.data().begin()));
}

TEST_CASE("header layout is little endian") {
  std::stringstream ss;
  write_gauge(ss, {2, 2, 2, 4}, GaugeField(32));
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "LQMG");
  CHECK(bytes[4] == 1);  // version
  CHECK(bytes[8 + 12] == 4);  // N3
  CHECK(bytes.size() == 4 + 4 + 16 + 32u * 4 * 9 * 16);
}

TEST_CASE("corrupt input is rejected") {
  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_spinor(bad), ValidationError);
  std::stringstream ss;
  write_clover(ss, {2, 2, 2, 2}, CloverField(16));
  std::string truncated = ss.str();
  truncated.resize(truncated.size() - 8);
  std::stringstream tr(truncated);
  CHECK_THROWS_AS(read_clover(tr), ValidationError);
  std::stringstream wrong_kind;
  write_clover(wrong_kind, {2, 2, 2, 2}, CloverField(16));
  CHECK_THROWS_AS(read_gauge(wrong_kind), ValidationError);
}
