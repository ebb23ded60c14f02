#include <set>

#include "doctest.h"
#include "lqml/errors.hpp"
#include "lqml/geometry.hpp"

using namespace lqml;

TEST_CASE("mixed-radix site numbering") {
  LatticeGeometry g({4, 6, 2, 8});
  CHECK(g.n_sites() == 4u * 6 * 2 * 8);
  // ((1*6 + 2)*2 + 1)*8 + 3 worked by hand
  CHECK(g.site_index({1, 2, 1, 3}) == 139u);
  CHECK(g.site_index({0, 0, 0, 0}) == 0u);
  CHECK(g.site_index({3, 5, 1, 7}) == g.n_sites() - 1);
  for (std::size_t x = 0; x < g.n_sites(); ++x) CHECK(g.site_index(g.site_coord(x)) == x);
}

TEST_CASE("periodic neighbors") {
  LatticeGeometry g({4, 4, 4, 4});
  CHECK(g.neighbor({3, 0, 0, 0}, 0, Dir::plus) == SiteCoord{0, 0, 0, 0});
  CHECK(g.neighbor({0, 2, 0, 0}, 0, Dir::minus) == SiteCoord{3, 2, 0, 0});
  CHECK(g.neighbor({0, 0, 0, 3}, 3, Dir::plus) == SiteCoord{0, 0, 0, 0});
  for (std::size_t x = 0; x < g.n_sites(); ++x) {
    for (int mu = 0; mu < 4; ++mu) {
      const std::size_t f = g.neighbor_index(x, mu, Dir::plus);
      CHECK(g.neighbor_index(f, mu, Dir::minus) == x);
      CHECK(g.site_parity(f) != g.site_parity(x));
    }
  }
}

TEST_CASE("parity classes split evenly") {
  LatticeGeometry g({2, 4, 6, 2});
  std::size_t even = 0;
  for (std::size_t x = 0; x < g.n_sites(); ++x) even += g.site_parity(x) == Parity::even;
  CHECK(even == g.n_sites() / 2);
  CHECK(parity({1, 1, 0, 0}) == Parity::even);
  CHECK(parity({1, 0, 0, 0}) == Parity::odd);
}

TEST_CASE("invalid extents are rejected") {
  CHECK_THROWS_AS(LatticeGeometry({3, 4, 4, 4}), ValidationError);
  CHECK_THROWS_AS(LatticeGeometry({0, 4, 4, 4}), ValidationError);
  LatticeGeometry g({4, 4, 4, 4});
  CHECK_THROWS_AS(g.site_index({4, 0, 0, 0}), ValidationError);
  CHECK_FALSE(g.contains({0, -1, 0, 0}));
}

TEST_CASE("rank decomposition") {
  LatticeGeometry g({8, 4, 4, 4});
  Decomposition d(g, {2, 2, 1, 1});
  CHECK(d.n_ranks() == 4);
  CHECK(d.local_dims() == Extents{4, 2, 4, 4});
  CHECK(d.is_split(0));
  CHECK_FALSE(d.is_split(2));

  std::set<std::size_t> seen;
  for (const RankDomain& dom : d.ranks()) {
    CHECK(dom.global_sites.size() == d.local_geometry().n_sites());
    for (std::size_t l = 0; l < dom.global_sites.size(); ++l) {
      const std::size_t gs = dom.global_sites[l];
      CHECK(d.owner(gs) == dom.rank);
      CHECK(d.local_index(gs) == l);
      seen.insert(gs);
    }
    // face of a split dimension: local volume / local extent
    CHECK(dom.boundary_sites(0, Dir::plus).size() == 2u * 4 * 4);
    CHECK(dom.boundary_sites(1, Dir::minus).size() == 4u * 4 * 4);
    CHECK(dom.boundary_sites(2, Dir::plus).empty());
  }
  CHECK(seen.size() == g.n_sites());

  // rank grid wraps periodically
  CHECK(d.neighbor_rank(0, 0, Dir::minus) == d.neighbor_rank(0, 0, Dir::plus));
  CHECK(d.neighbor_rank(0, 2, Dir::plus) == 0);
}

TEST_CASE("decomposition preconditions") {
  LatticeGeometry g({8, 4, 4, 4});
  CHECK_THROWS_AS(Decomposition(g, {3, 1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(Decomposition(g, {1, 4, 1, 1}), ValidationError);  // local extent 1
  CHECK_THROWS_AS(Decomposition(g, {0, 1, 1, 1}), ValidationError);
}
