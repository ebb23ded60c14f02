// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// hard failure. Criterion 10 is informational and never fails the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lqml/bench.hpp"
#include "lqml/cost_model.hpp"
#include "lqml/gmres.hpp"
#include "lqml/halo.hpp"
#include "lqml/oracle.hpp"
#include "lqml/perf_model.hpp"
#include "lqml/solver.hpp"
#include "lqml/wilson_dirac.hpp"

using namespace lqml;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("[%s] criterion %2d: %s | %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id,
              title.c_str(), o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Problem {
  LatticeGeometry geom;
  GaugeField gauge;
  CloverField clover;
  DiracParams params;
};

Problem random_problem(Extents dims, std::uint64_t seed) {
  LatticeGeometry g(dims);
  GaugeField u = gen_gauge(g, GaugeMode::random, seed);
  CloverField c = gen_clover(g, CloverMode::random_hermitian, 0.1, seed + 1);
  return {g, std::move(u), std::move(c), DiracParams{-0.5}};
}

BlockSpinorField random_spinor(std::size_t sites, int b, Layout l, std::uint64_t seed) {
  BlockSpinorField v(sites, kSpinorComponents, {l, b});
  fill_gaussian(v, seed);
  return v;
}

double rel_diff(const BlockSpinorField& a, const BlockSpinorField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t x = 0; x < a.sites(); ++x)
    for (int k = 0; k < a.components(); ++k)
      for (int i = 0; i < a.block(); ++i) {
        num = std::max(num, std::abs(a.at(x, k, i) - b.at(x, k, i)));
        den = std::max(den, std::abs(b.at(x, k, i)));
      }
  return den > 0.0 ? num / den : num;
}

LinearOperator as_op(const WilsonDirac& d) {
  return [&d](const BlockSpinorField& in, BlockSpinorField& out) { d.apply(in, out); };
}

Outcome criterion1() {
  const auto p = random_problem({4, 4, 4, 4}, 101);
  const WilsonDirac d(p.geom, p.gauge, p.clover, p.params);
  const auto dense = oracle::assemble_dirac(p.geom, p.gauge, p.clover, p.params);
  double worst = 0.0;
  for (int b : {1, 2, 4, 8}) {
    for (Layout l : {Layout::column_major, Layout::row_major}) {
      const auto psi = random_spinor(p.geom.n_sites(), b, l, 10 + b);
      const auto eta = d.apply(psi);
      for (int i = 0; i < b; ++i) {
        const oracle::DenseVector ref = dense * oracle::to_dense(psi, i);
        worst = std::max(worst, (oracle::to_dense(eta, i) - ref).norm() / ref.norm());
      }
    }
  }
  return {worst <= 1e-12, fmt("max rel err %.3e <= 1e-12 over b in {1,2,4,8} x 2 layouts", worst)};
}

Outcome criterion2() {
  double worst = 0.0;
  for (double m0 : {-0.5, 0.1}) {
    LatticeGeometry g({4, 4, 4, 4});
    const GaugeField u = gen_gauge(g, GaugeMode::unit, 0);
    const CloverField c = gen_clover(g, CloverMode::zero, 0.0, 0);
    const WilsonDirac d(g, u, c, DiracParams{m0});
    for (Layout l : {Layout::column_major, Layout::row_major}) {
      BlockSpinorField psi(g.n_sites(), kSpinorComponents, {l, 4});
      for (std::size_t x = 0; x < g.n_sites(); ++x)
        for (int k = 0; k < kSpinorComponents; ++k)
          for (int i = 0; i < 4; ++i) psi.at(x, k, i) = Complex(1.0 + k, 0.5 * i - 0.25 * k);
      const auto eta = d.apply(psi);
      for (std::size_t x = 0; x < g.n_sites(); ++x)
        for (int k = 0; k < kSpinorComponents; ++k)
          for (int i = 0; i < 4; ++i)
            worst = std::max(worst, std::abs(eta.at(x, k, i) - m0 * psi.at(x, k, i)) /
                                        std::abs(psi.at(x, k, i)));
    }
  }
  return {worst <= 1e-14, fmt("free-field max rel err %.3e <= 1e-14", worst)};
}

Outcome criterion3() {
  const auto p = random_problem({4, 4, 4, 4}, 103);
  const WilsonDirac d(p.geom, p.gauge, p.clover, p.params);
  const auto psi1 = random_spinor(p.geom.n_sites(), 4, Layout::column_major, 7);
  const auto psi2 = convert_layout(psi1, Layout::row_major);
  const double kernel = rel_diff(d.apply(psi2), d.apply(psi1));

  GmresConfig cfg;
  cfg.restarts = 50;
  const auto s1 = BatchedGmres(as_op(d), cfg).solve(psi1);
  const auto s2 = BatchedGmres(as_op(d), cfg).solve(psi2);
  const double solve = rel_diff(s2.x, s1.x);
  const bool ok = kernel <= 1e-13 && solve <= 1e-8 && s1.converged && s2.converged;
  return {ok, fmt("kernel %.3e <= 1e-13, ", kernel) + fmt("GMRES solution %.3e <= 1e-8", solve)};
}

Outcome criterion4() {
  const auto p = random_problem({4, 4, 4, 4}, 104);
  const WilsonDirac d(p.geom, p.gauge, p.clover, p.params);
  const auto eta = random_spinor(p.geom.n_sites(), 4, Layout::column_major, 8);
  GmresConfig cfg;
  cfg.restarts = 50;
  const double dev = batched_vs_independent_audit(as_op(d), eta, cfg);

  const auto one = random_spinor(p.geom.n_sites(), 1, Layout::column_major, 9);
  BlockSpinorField same(one.sites(), kSpinorComponents, {Layout::column_major, 3});
  for (int i = 0; i < 3; ++i) insert_rhs(one, i, same);
  const auto r = BatchedGmres(as_op(d), cfg).solve(same);
  bool identical = true;
  for (const auto& h : r.history) identical = identical && h[0] == h[1] && h[0] == h[2];
  return {dev <= 1e-8 && identical,
          fmt("history deviation %.3e <= 1e-8, ", dev) +
              (identical ? "identical rhs histories identical" : "identical rhs histories DIFFER")};
}

Outcome criterion5() {
  const auto p = random_problem({4, 4, 4, 4}, 105);
  const WilsonDirac d(p.geom, p.gauge, p.clover, p.params);
  const auto op = as_op(d);
  const auto eta = random_spinor(p.geom.n_sites(), 2, Layout::row_major, 10);
  GmresConfig cfg;  // restart length 10, 10 restarts: 100 iterations
  BatchedGmres g(op, cfg);
  BlockSpinorField x(eta.sites(), kSpinorComponents, eta.policy());
  double worst = 0.0, worst_above = 0.0;
  int steps = 0;
  const auto en = block_norms(eta);
  for (int cycle = 0; cycle < cfg.restarts; ++cycle) {
    g.start_cycle(eta, x);
    for (int j = 0; j < cfg.restart_len; ++j) {
      g.arnoldi_step();
      ++steps;
      const auto xs = g.current_solution();
      const auto gam = g.gamma_residuals();
      BlockSpinorField r = d.apply(xs);
      block_scale(std::vector<Complex>(2, -1.0), r);
      block_axpy(std::vector<Complex>(2, 1.0), eta, r);
      const auto rn = block_norms(r);
      for (int i = 0; i < 2; ++i) {
        // Relative to ||r|| while the residual is above the solver tolerance;
        // below it the explicit residual approaches rounding level (about
        // 1e-14 ||eta|| here), so the comparison is scaled by tol ||eta||.
        const double scale = std::max(rn[i], cfg.tol * en[i]);
        const double dev = std::abs(gam[i] - rn[i]) / scale;
        worst = std::max(worst, dev);
        if (rn[i] >= cfg.tol * en[i]) worst_above = std::max(worst_above, dev);
      }
    }
    x = g.current_solution();
  }
  return {worst <= 1e-8 && steps == 100,
          fmt("max |gamma - ||r||| / max(||r||, tol ||eta||) = %.3e <= 1e-8 over ", worst) +
              std::to_string(steps) + fmt(" iterations (%.3e while ||r|| >= tol ||eta||)", worst_above)};
}

Outcome criterion6() {
  std::string detail;
  bool ok = true;
  for (Extents dims : {Extents{4, 4, 4, 4}, Extents{8, 4, 4, 4}}) {
    const auto p = random_problem(dims, 106);
    const WilsonDirac d(p.geom, p.gauge, p.clover, p.params);
    const auto eta = random_spinor(p.geom.n_sites(), 2, Layout::column_major, 11);
    GmresConfig cfg;
    cfg.tol = 1e-8;
    cfg.restarts = 100;
    const auto full = solve_wilson(d, eta, cfg, false);
    const auto oe = solve_wilson(d, eta, cfg, true);
    const double agree = rel_diff(oe.x, full.x);
    const double ratio = static_cast<double>(oe.gmres.iterations) / full.gmres.iterations;
    const bool here = full.gmres.converged && oe.gmres.converged && ratio <= 2.0 / 3.0 &&
                      agree <= 1e-6;
    ok = ok && here;
    if (!detail.empty()) detail += "; ";
    detail += to_string(dims) + ": " + std::to_string(oe.gmres.iterations) + "/" +
              std::to_string(full.gmres.iterations) + fmt(" iters (ratio %.3f <= 0.667)", ratio) +
              fmt(", solutions agree to %.1e", agree);
  }
  return {ok, detail};
}

Outcome criterion7() {
  const auto p = random_problem({8, 4, 4, 4}, 107);
  const WilsonDirac d(p.geom, p.gauge, p.clover, p.params);
  const auto psi = random_spinor(p.geom.n_sites(), 2, Layout::column_major, 12);
  const auto ref = d.apply(psi);
  double worst = 0.0;
  std::string grids;
  for (Extents grid : {Extents{2, 1, 1, 1}, Extents{2, 2, 1, 1}, Extents{2, 2, 2, 2}}) {
    DistributedDirac dd(p.geom, p.gauge, p.clover, p.params, grid);
    for (ExecutionMode m : {ExecutionMode::sequential, ExecutionMode::concurrent}) {
      const auto eta = dd.apply(psi, m);
      worst = std::max(worst, rel_diff(eta, ref));
    }
    grids += to_string(grid) + " ";
  }
  return {worst <= 1e-15, fmt("max rel diff %.3e <= 1e-15 on grids ", worst) + grids +
                              "(sequential and threaded)"};
}

Outcome criterion8() {
  const double ai1 = arithmetic_intensity(1), ai16 = arithmetic_intensity(16);
  const double perf = theoretical_perf(155e9, 1) / 1e9;
  const Ratio rw = read_write_ratio(1);
  CounterSample s;
  s.l2_refill = 392270;
  s.l2_writeback = 165508;
  s.cycles = 32e6;
  s.frequency = 1.8e9;
  s.ranks = 16;
  const double bw = effective_bandwidth(s) / 1e9;
  const bool ok = ai1 == 2574.0 / 4512.0 && ai16 == 41184.0 / 44832.0 &&
                  std::abs(perf - 88.4) <= 0.05 && rw.num == 534 && rw.den == 204 && bw >= 125.0 &&
                  bw <= 131.0;
  return {ok, fmt("AI(1)=%.6f ", ai1) + fmt("AI(16)=%.6f ", ai16) +
                  fmt("perf(155 GB/s)=%.2f GFlop/s ", perf) + "rw=" + std::to_string(rw.num) + ":" +
                  std::to_string(rw.den) + fmt(" eff_bw=%.2f GB/s in [125,131]", bw)};
}

Outcome criterion9() {
  using namespace lqml::cost;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (int b : {1, 3, 8, 16}) {
    std::array<Complex, 9> a{};
    for (auto& z : a) z = {n(rng), n(rng)};
    std::vector<Complex> m(3 * b);
    for (auto& z : m) z = {n(rng), n(rng)};
    const auto ref = reference_matmul(a, m, b);
    for (Strategy s : kAllStrategies) {
      const auto out = run_kernel(s, a, m, b, 512).out;
      for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(out[k] - ref[k]));
    }
  }
  bool ok = worst <= 1e-13;
  std::string detail = fmt("values max err %.1e; ", worst);
  for (int b : {8, 16}) {
    for (const char* wname : {"uniform", "override"}) {
      const auto w = CostWeights::preset(wname);
      const double na = call_cost(Strategy::neg_a, b, 512, w);
      const double nm = call_cost(Strategy::neg_m, b, 512, w);
      const double de = call_cost(Strategy::deinterleave_both, b, 512, w);
      const double sc = call_cost(Strategy::scalar, b, 512, w);
      ok = ok && na < nm && nm < de && de < sc;
      if (std::string(wname) == "uniform") {
        const double r1 = de / na, r2 = de / nm;
        ok = ok && r1 >= 1.77 && r1 <= 3.69 && r2 >= 0.92 && r2 <= 1.92;
        detail += "b=" + std::to_string(b) + fmt(": deint/negA %.2f", r1) +
                  fmt(" deint/negM %.2f; ", r2);
      }
    }
  }
  detail += "ordering negA<negM<deint<scalar under uniform and override weights";
  return {ok, detail};
}

Outcome criterion10() {
  const auto p = random_problem({8, 4, 4, 4}, 110);
  const WilsonDirac d(p.geom, p.gauge, p.clover, p.params);
  const BenchRecord base = bench_dirac(d, 1, Layout::column_major, 2, 7, 1);
  BenchRecord best = base;
  best.gflops = 0.0;
  for (int b : {4, 8, 16})
    for (Layout l : {Layout::column_major, Layout::row_major}) {
      const BenchRecord r = bench_dirac(d, b, l, 2, 7, 1);
      if (r.gflops > best.gflops) best = r;
    }
  const double speedup = best.gflops / base.gflops;
  std::string detail = fmt("b=1 layout 1: %.2f GFlop/s; best b>=4: ", base.gflops) +
                       "b=" + std::to_string(best.b) + " layout " +
                       std::to_string(static_cast<int>(best.layout)) +
                       fmt(" %.2f GFlop/s; ", best.gflops) + fmt("speedup %.2fx", speedup);
  if (speedup < 1.0) detail += " [FLAG: below 1.0, informational only]";
  return {true, detail + " (informational)"};
}

}  // namespace

int main() {
  report(1, "operator vs dense oracle on 4^4", criterion1);
  report(2, "free-field identity", criterion2);
  report(3, "layout invariance", criterion3);
  report(4, "batched vs independent GMRES", criterion4);
  report(5, "Givens residual vs explicit residual", criterion5);
  report(6, "odd-even iteration reduction", criterion6);
  report(7, "multi-rank equivalence on 8x4^3", criterion7);
  report(8, "performance-model formulas", criterion8);
  report(9, "cost-model ordering and ratios", criterion9);
  report(10, "multiple-rhs throughput", criterion10);
  std::printf("%d hard failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
