#include <random>

#include "doctest.h"
#include "lqml/cost_model.hpp"
#include "lqml/errors.hpp"

using namespace lqml;
using namespace lqml::cost;

namespace {

std::array<Complex, 9> random_a(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::array<Complex, 9> a{};
  for (auto& z : a) z = {n(rng), n(rng)};
  return a;
}

std::vector<Complex> random_m(std::mt19937_64& rng, int b) {
  std::normal_distribution<double> n;
  std::vector<Complex> m(3 * b);
  for (auto& z : m) z = {n(rng), n(rng)};
  return m;
}

double uniform_cost(Strategy s, int b) { return call_cost(s, b, 512, CostWeights::uniform()); }

}  // namespace

TEST_CASE("every strategy computes A M") {
  std::mt19937_64 rng(5);
  for (int svl : {512, 1024, 2048}) {
    for (Strategy s : kAllStrategies) {
      for (int b = 1; b <= 19; ++b) {
        const auto a = random_a(rng);
        const auto m = random_m(rng, b);
        const auto ref = reference_matmul(a, m, b);
        const auto got = run_kernel(s, a, m, b, svl).out;
        REQUIRE(got.size() == ref.size());
        double err = 0;
        for (std::size_t k = 0; k < ref.size(); ++k) err = std::max(err, std::abs(got[k] - ref[k]));
        CAPTURE(to_string(s));
        CAPTURE(b);
        CHECK(err <= 1e-13);
      }
    }
  }
}

TEST_CASE("reference product against a hand computed case") {
  std::array<Complex, 9> a{};
  a[0] = {0, 1};  // i
  a[4] = 2.0;
  a[8] = {1, -1};
  const std::vector<Complex> m = {{1, 1}, 3.0, {0, 2}};
  const auto o = reference_matmul(a, m, 1);
  CHECK(o[0] == Complex(-1, 1));
  CHECK(o[1] == Complex(6, 0));
  CHECK(o[2] == Complex(2, 2));
}

TEST_CASE("narrow machines only run the non-tile strategies") {
  std::mt19937_64 rng(1);
  const auto a = random_a(rng);
  const auto m = random_m(rng, 4);
  const auto ref = reference_matmul(a, m, 4);
  for (int svl : {128, 256}) {
    CHECK_THROWS_AS(run_kernel(Strategy::neg_a, a, m, 4, svl), ValidationError);
    CHECK_THROWS_AS(run_kernel(Strategy::neg_m, a, m, 4, svl), ValidationError);
    const auto got = run_kernel(Strategy::scalar, a, m, 4, svl).out;
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(got[k] - ref[k]) <= 1e-13);
  }
  // a column of A needs three lanes
  CHECK_THROWS_AS(run_kernel(Strategy::deinterleave_both, a, m, 4, 128), ValidationError);
  const auto got = run_kernel(Strategy::deinterleave_both, a, m, 4, 256).out;
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(got[k] - ref[k]) <= 1e-13);
  CHECK_THROWS_AS(AbstractMachine(384), ValidationError);
  CHECK_THROWS_AS(AbstractMachine(4096), ValidationError);
}

TEST_CASE("uniform instruction counts at 512 bits") {
  CHECK(uniform_cost(Strategy::neg_a, 8) == 28);
  CHECK(uniform_cost(Strategy::neg_a, 16) == 47);
  CHECK(uniform_cost(Strategy::neg_m, 8) == 41);
  CHECK(uniform_cost(Strategy::neg_m, 16) == 79);
  CHECK(uniform_cost(Strategy::deinterleave_both, 8) == 63);
  CHECK(uniform_cost(Strategy::deinterleave_both, 16) == 123);
  CHECK(uniform_cost(Strategy::scalar, 8) == 546);
}

TEST_CASE("ordering and ratios of the strategies") {
  for (int b : {8, 16}) {
    const double na = uniform_cost(Strategy::neg_a, b);
    const double nm = uniform_cost(Strategy::neg_m, b);
    const double de = uniform_cost(Strategy::deinterleave_both, b);
    CHECK(na < nm);
    CHECK(nm < de);
    CHECK(de / na >= 1.77);
    CHECK(de / na <= 3.69);
    CHECK(de / nm >= 0.92);
    CHECK(de / nm <= 1.92);
  }
  const auto w = CostWeights::override_preset();
  CHECK(call_cost(Strategy::neg_a, 8, 512, w) < call_cost(Strategy::neg_m, 8, 512, w));
  CHECK(call_cost(Strategy::neg_m, 8, 512, w) < call_cost(Strategy::deinterleave_both, 8, 512, w));
}

TEST_CASE("histograms only contain what the strategy uses") {
  std::mt19937_64 rng(2);
  const auto a = random_a(rng);
  const auto m = random_m(rng, 8);
  const auto na = run_kernel(Strategy::neg_a, a, m, 8).histogram;
  CHECK(na[Opcode::FMOPA] > 0);
  CHECK(na[Opcode::SCALAR_FMA] == 0);
  const auto de = run_kernel(Strategy::deinterleave_both, a, m, 8).histogram;
  CHECK(de[Opcode::FMOPA] == 0);
  CHECK(de[Opcode::LD2] > 0);
  CHECK(de[Opcode::ST2] > 0);
  const auto sc = run_kernel(Strategy::scalar, a, m, 8).histogram;
  CHECK(sc[Opcode::SCALAR_FMA] == 3u * 8 * 3 * 4);  // 4 real multiply-adds per complex product
  CHECK(sc.total() == 546);
}

TEST_CASE("block size deltas") {
  const auto w = CostWeights::uniform();
  CHECK(delta_cost(Strategy::neg_a, 8, 8, 100, 512, w) == 0.0);
  CHECK(delta_cost(Strategy::neg_a, 8, 16, 10, 512, w) == (47 - 28) * 10);
  CHECK_THROWS_AS(delta_cost(Strategy::neg_a, 16, 8, 10, 512, w), ValidationError);
  CHECK_THROWS_AS(delta_cost(Strategy::neg_a, 8, 16, -1, 512, w), ValidationError);
}

TEST_CASE("weights and names") {
  std::map<std::string, double> m;
  for (int i = 0; i < kOpcodeCount; ++i) m[opcode_name(static_cast<Opcode>(i))] = 1.0;
  const auto w = CostWeights::from_map(m);
  CHECK(w[Opcode::FMOPA] == 1.0);
  m.erase("FMOPA");
  CHECK_THROWS_AS(CostWeights::from_map(m), ValidationError);
  m["FMOPA"] = 1.0;
  m["BOGUS"] = 1.0;
  CHECK_THROWS_AS(CostWeights::from_map(m), ValidationError);
  CHECK(CostWeights::preset("override")[Opcode::MOV] == 0.0);
  CHECK(CostWeights::preset("override")[Opcode::ST1] == 2.0);
  CHECK_THROWS_AS(CostWeights::preset("fast"), ValidationError);
  for (Strategy s : kAllStrategies) CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(strategy_from_string("neg"), ValidationError);
}
