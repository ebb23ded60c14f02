#include <cstring>
#include <thread>

#include "doctest.h"
#include "lqml/errors.hpp"
#include "lqml/halo.hpp"
#include "support.hpp"

using namespace lqml;
using namespace std::chrono_literals;

TEST_CASE("a single-rank grid sends nothing and matches the plain operator") {
  const auto p = test::random_problem({4, 2, 2, 2}, 5);
  DistributedDirac dd(p.geom, p.gauge, p.clover, p.params, {1, 1, 1, 1});
  const auto psi = test::random_spinor(p.geom.n_sites(), 2, Layout::row_major, 3);
  const auto eta = dd.apply(psi);
  CHECK(test::bitwise_equal(eta, test::make_dirac(p).apply(psi)));
  CHECK(dd.last_audit().posted == 0);
  CHECK(dd.last_audit().unconsumed == 0);
}

TEST_CASE("messages arrive byte for byte on the addressed channel") {
  LatticeGeometry g({4, 2, 2, 2});
  Decomposition d(g, {2, 1, 1, 1});
  HaloNetwork net(d, 200ms);
  net.begin_epoch();
  const std::vector<Complex> payload = {{1.5, -2.0}, {0.0, 3.25}, {-7.0, 1e-300}};
  Communicator c0(net, 0), c1(net, 1);
  const SendHandle h = c0.post_send(0, Dir::minus, payload);
  CHECK(h.dst_rank == 1);  // two ranks: the -mu neighbour of 0 is 1
  CHECK(h.epoch == net.epoch());
  const auto got = c1.complete_recv(0, Dir::minus);
  REQUIRE(got.size() == payload.size());
  CHECK(std::memcmp(got.data(), payload.data(), payload.size() * sizeof(Complex)) == 0);
  const EpochAudit a = net.end_epoch();
  CHECK(a.posted == 1);
  CHECK(a.received == 1);
  CHECK(a.unconsumed == 0);
}

TEST_CASE("a duplicate post on one channel is an error") {
  LatticeGeometry g({4, 2, 2, 2});
  Decomposition d(g, {2, 1, 1, 1});
  HaloNetwork net(d, 200ms);
  net.begin_epoch();
  net.post_send(0, 0, Dir::plus, {Complex(1.0)});
  CHECK_THROWS_AS(net.post_send(0, 0, Dir::plus, {Complex(2.0)}), CommError);
  // a new epoch reopens the channel
  net.begin_epoch();
  CHECK_NOTHROW(net.post_send(0, 0, Dir::plus, {Complex(2.0)}));
}

TEST_CASE("a missing message times out with the channel named") {
  LatticeGeometry g({4, 4, 2, 2});
  Decomposition d(g, {2, 2, 1, 1});
  HaloNetwork net(d, 30ms);
  net.begin_epoch();
  try {
    net.complete_recv(3, 1, Dir::plus);
    FAIL("expected CommError");
  } catch (const CommError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("rank 3") != std::string::npos);
    CHECK(msg.find("mu 1") != std::string::npos);
  }
  CHECK(net.wait_seconds(3) > 0.0);
  CHECK(net.wait_seconds(0) == 0.0);
}

TEST_CASE("unread messages show up in the audit") {
  LatticeGeometry g({4, 2, 2, 2});
  Decomposition d(g, {2, 1, 1, 1});
  HaloNetwork net(d);
  net.begin_epoch();
  net.post_send(1, 0, Dir::plus, {Complex(1.0)});
  const auto a = net.end_epoch();
  CHECK(a.posted == 1);
  CHECK(a.unconsumed == 1);
  net.begin_epoch();
  CHECK(net.stats(0).wait_seconds == 0.0);
}

TEST_CASE("a receive blocks until the matching post arrives") {
  LatticeGeometry g({4, 2, 2, 2});
  Decomposition d(g, {2, 1, 1, 1});
  HaloNetwork net(d, 2000ms);
  net.begin_epoch();
  std::vector<Complex> got;
  std::thread receiver([&] { got = net.complete_recv(0, 0, Dir::plus); });
  std::this_thread::sleep_for(20ms);
  net.post_send(1, 0, Dir::plus, {Complex(4.0, 5.0)});
  receiver.join();
  REQUIRE(got.size() == 1);
  CHECK(got[0] == Complex(4.0, 5.0));
  CHECK(net.stats(0).wait_seconds > 0.0);
}

TEST_CASE("phases out of order are contract violations") {
  const auto p = test::random_problem({4, 2, 2, 2});
  DistributedDirac dd(p.geom, p.gauge, p.clover, p.params, {2, 1, 1, 1}, 50ms);
  const auto psi = dd.scatter(test::random_spinor(p.geom.n_sites(), 1, Layout::column_major, 1));
  std::vector<BlockSpinorField> eta(2);
  dd.network().begin_epoch();
  CHECK_THROWS_AS(dd.receive_halos(0), ContractViolation);
  dd.post_phase(0, psi[0], eta[0]);
  CHECK_THROWS_AS(dd.accumulate_phase(0, eta[0]), ContractViolation);
}

TEST_CASE("scatter and gather are inverse") {
  const auto p = test::random_problem({4, 4, 2, 2});
  DistributedDirac dd(p.geom, p.gauge, p.clover, p.params, {2, 2, 1, 1});
  const auto psi = test::random_spinor(p.geom.n_sites(), 3, Layout::row_major, 2);
  const auto parts = dd.scatter(psi);
  CHECK(parts.size() == 4);
  CHECK(parts[0].sites() == 16);
  CHECK(test::bitwise_equal(dd.gather(parts), psi));
}

TEST_CASE("multi-rank application is bitwise identical to one rank") {
  const auto p = test::random_problem({8, 4, 4, 4}, 19);
  const WilsonDirac d = test::make_dirac(p);
  for (Layout l : {Layout::column_major, Layout::row_major}) {
    const auto psi = test::random_spinor(p.geom.n_sites(), 2, l, 77);
    const auto ref = d.apply(psi);
    for (Extents grid : {Extents{2, 1, 1, 1}, Extents{2, 2, 1, 1}, Extents{1, 2, 1, 2},
                         Extents{2, 2, 2, 1}, Extents{2, 2, 2, 2}}) {
      DistributedDirac dd(p.geom, p.gauge, p.clover, p.params, grid);
      for (ExecutionMode m : {ExecutionMode::sequential, ExecutionMode::concurrent}) {
        CAPTURE(to_string(grid));
        const auto eta = dd.apply(psi, m);
        CHECK(test::bitwise_equal(eta, ref));
        CHECK(dd.last_audit().unconsumed == 0);
        CHECK(dd.last_audit().posted == dd.last_audit().received);
        CHECK(dd.last_stats().size() == static_cast<std::size_t>(dd.n_ranks()));
      }
    }
  }
}

TEST_CASE("grids that split a dimension into odd pieces are rejected") {
  const auto p = test::random_problem({4, 2, 2, 2});
  CHECK_THROWS_AS(DistributedDirac(p.geom, p.gauge, p.clover, p.params, {4, 1, 1, 1}),
                  ValidationError);
  CHECK_THROWS_AS(DistributedDirac(p.geom, p.gauge, p.clover, p.params, {3, 1, 1, 1}),
                  ValidationError);
}
