#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "lqml/config.hpp"
#include "lqml/errors.hpp"

using namespace lqml;

TEST_CASE("defaults") {
  const RunConfig c;
  CHECK(c.dims == Extents{4, 4, 4, 4});
  CHECK(c.m0 == -0.5);
  CHECK(c.tol == 1e-8);
  CHECK(c.restart_len == 10);
  CHECK(c.seed == 42);
  CHECK_NOTHROW(c.validate());
  CHECK(c.to_map().size() == RunConfig::keys().size());
}

TEST_CASE("parsing text with comments and lists") {
  const auto c = RunConfig::parse(
      "# a run\n"
      "lattice.dims = 8, 4, 4, 4\n"
      "ranks.grid = 2,1,1,1   # split time\n"
      "block.b = 1,2,4\n"
      "block.layout = 1,2\n"
      "\n"
      "solver.odd_even = true\n"
      "dirac.m0 = 0.25\n");
  CHECK(c.dims == Extents{8, 4, 4, 4});
  CHECK(c.grid == Extents{2, 1, 1, 1});
  CHECK(c.b == std::vector<int>{1, 2, 4});
  CHECK(c.layouts == std::vector<Layout>{Layout::column_major, Layout::row_major});
  CHECK(c.odd_even);
  CHECK(c.m0 == 0.25);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("bad values name the key") {
  RunConfig c;
  const auto message = [&](const char* key, const char* value) -> std::string {
    try {
      c.set(key, value);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return {};
  };
  CHECK(message("block.layout", "3").find("block.layout") != std::string::npos);
  CHECK(message("solver.tol", "abc").find("solver.tol") != std::string::npos);
  CHECK(message("lattice.dims", "4,4,4").find("lattice.dims") != std::string::npos);
  CHECK(message("no.such.key", "1").find("no.such.key") != std::string::npos);
  CHECK(message("solver.odd_even", "maybe").find("solver.odd_even") != std::string::npos);
  CHECK_THROWS_AS(RunConfig::parse("seed 3\n"), ValidationError);
}

TEST_CASE("cross-field validation") {
  RunConfig c;
  c.dims = {4, 4, 4, 5};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.dims = {8, 4, 4, 4};
  c.grid = {3, 1, 1, 1};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.grid = {8, 1, 1, 1};  // local extent 1
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.grid = {2, 2, 2, 2};
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("hash is FNV-1a of the canonical form") {
  // published FNV-1a 64 test vectors
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);

  RunConfig a, b;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.seed = 43;
  CHECK(a.hash() != b.hash());
  // the hash depends on values, not on how they were spelled
  const auto c = RunConfig::parse("dirac.m0 = -0.50\nseed=42\n");
  CHECK(c.hash() == a.hash());
}

TEST_CASE("canonical text round trips") {
  RunConfig a = RunConfig::parse("block.b = 2,8\nsolver.tol = 1e-10\noutput.format = csv\n");
  const RunConfig b = RunConfig::parse(a.canonical());
  CHECK(a.canonical() == b.canonical());
  CHECK(b.b == std::vector<int>{2, 8});
}

TEST_CASE("loading from a file") {
  const std::string path = "lqml_test_config.txt";
  {
    std::ofstream os(path);
    os << "seed = 7\nthreads = 2\n";
  }
  const auto c = RunConfig::load(path);
  CHECK(c.seed == 7);
  CHECK(c.threads == 2);
  std::remove(path.c_str());
  CHECK_THROWS_AS(RunConfig::load("does/not/exist.cfg"), ValidationError);
}
