#include "commands.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "lqml/bench.hpp"
#include "lqml/cost_model.hpp"
#include "lqml/errors.hpp"
#include "lqml/gauge.hpp"
#include "lqml/halo.hpp"
#include "lqml/odd_even.hpp"
#include "lqml/oracle.hpp"
#include "lqml/perf_model.hpp"
#include "lqml/rng.hpp"
#include "lqml/snapshot.hpp"
#include "lqml/solver.hpp"

namespace lqml::cli {

using nlohmann::json;

namespace {

struct Problem {
  LatticeGeometry geom;
  GaugeField gauge;
  CloverField clover;
};

Problem make_problem(const RunConfig& cfg) {
  LatticeGeometry g(cfg.dims);
  GaugeField u = gen_gauge(g, cfg.gauge_mode, cfg.seed);
  CloverField c = gen_clover(g, cfg.clover_mode, cfg.clover_scale, cfg.seed + 1);
  return {g, std::move(u), std::move(c)};
}

// Source fields are drawn from a stream separate from the gauge and clover ones.
std::uint64_t source_seed(const RunConfig& cfg) { return cfg.seed + 2; }

void apply_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
}

/// Payload sink: cfg.output_path when set, otherwise the command stream.
class Payload {
 public:
  Payload(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError("cannot open output file " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void begin(const std::string& command, const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  out << header_json(command, cfg) << '\n';
}

bool is_split(const Extents& grid) {
  for (int g : grid)
    if (g > 1) return true;
  return false;
}

}  // namespace

std::string header_json(const std::string& command, const RunConfig& cfg) {
  const json h = {{"command", command},
                  {"version", kVersion},
                  {"config_hash", cfg.hash()},
                  {"seed", cfg.seed},
                  {"rng", Rng::kAlgorithm}};
  return h.dump();
}

int bench_dirac(const RunConfig& cfg, std::ostream& out) {
  begin("bench-dirac", cfg, out);
  apply_threads(cfg);
  const Problem p = make_problem(cfg);
  const WilsonDirac d(p.geom, p.gauge, p.clover, DiracParams{cfg.m0});

  json records = json::array();
  for (int b : cfg.b) {
    for (Layout l : cfg.layouts) {
      const BenchRecord r = bench_dirac(d, b, l, cfg.warmup, cfg.repetitions, source_seed(cfg));
      json rec = {{"b", r.b},
                  {"layout", static_cast<int>(r.layout)},
                  {"sites", r.sites},
                  {"repetitions", r.repetitions},
                  {"median_seconds", r.median_seconds},
                  {"min_seconds", r.min_seconds},
                  {"gflops", r.gflops},
                  {"ai", r.ai},
                  {"flops_per_site", 2574 * b},
                  {"bytes_per_site", (168 * b + 114) * 16},
                  {"input_checksum", r.input_checksum}};
      if (is_split(cfg.grid)) {
        DistributedDirac dd(p.geom, p.gauge, p.clover, DiracParams{cfg.m0}, cfg.grid);
        BlockSpinorField psi(p.geom.n_sites(), kSpinorComponents, {l, b});
        fill_gaussian(psi, source_seed(cfg));
        std::vector<double> wait(dd.n_ranks(), 0.0), compute(dd.n_ranks(), 0.0);
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
          dd.apply(psi, ExecutionMode::concurrent);
          for (const EpochStats& s : dd.last_stats()) {
            wait[s.rank] += s.wait_seconds;
            compute[s.rank] += s.compute_seconds;
          }
        }
        json ranks = json::array();
        for (int r = 0; r < dd.n_ranks(); ++r) {
          ranks.push_back({{"rank", r},
                           {"wait_seconds", wait[r]},
                           {"compute_seconds", compute[r]},
                           {"wait_compute_ratio", compute[r] > 0 ? wait[r] / compute[r] : 0.0}});
        }
        rec["ranks"] = ranks;
      }
      records.push_back(rec);
    }
  }

  Payload sink(cfg.output_path, out);
  if (cfg.output_format == "csv") {
    *sink << "b,layout,sites,median_seconds,gflops,ai,input_checksum\n";
    for (const auto& r : records) {
      *sink << r["b"] << ',' << r["layout"] << ',' << r["sites"] << ','
            << r["median_seconds"].get<double>() << ',' << r["gflops"].get<double>() << ','
            << r["ai"].get<double>() << ',' << r["input_checksum"] << '\n';
    }
  } else {
    *sink << json{{"records", records}}.dump(2) << '\n';
  }
  return 0;
}

int solve(const RunConfig& cfg, const SolveOptions& opt, std::ostream& out) {
  begin("solve", cfg, out);
  apply_threads(cfg);
  const Problem p = make_problem(cfg);
  const WilsonDirac d(p.geom, p.gauge, p.clover, DiracParams{cfg.m0});
  BlockSpinorField eta(p.geom.n_sites(), kSpinorComponents, {cfg.layouts.front(), cfg.b.front()});
  fill_gaussian(eta, source_seed(cfg));

  GmresConfig gc;
  gc.tol = cfg.tol;
  gc.restart_len = cfg.restart_len;
  gc.restarts = cfg.restarts;
  gc.fixed_iterations = cfg.fixed_iterations;
  const auto t0 = std::chrono::steady_clock::now();
  const WilsonSolveResult r = solve_wilson(d, eta, gc, cfg.odd_even);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const json summary = {{"iterations", r.gmres.iterations},
                        {"cycles", r.gmres.cycles},
                        {"converged", r.gmres.converged},
                        {"stagnated", r.gmres.stagnated},
                        {"odd_even", r.odd_even},
                        {"seconds", seconds},
                        {"explicit_relres", r.explicit_relres},
                        {"breakdown_step", r.gmres.breakdown_step}};
  if (!opt.solution_path.empty()) save_spinor(opt.solution_path, cfg.dims, r.x);

  Payload sink(cfg.output_path, out);
  if (cfg.output_format == "csv") {
    out << summary.dump() << '\n';
    *sink << "iter,rhs,relnorm\n";
    *sink << std::setprecision(17);
    for (std::size_t k = 0; k < r.gmres.history.size(); ++k)
      for (std::size_t i = 0; i < r.gmres.history[k].size(); ++i)
        *sink << k + 1 << ',' << i << ',' << r.gmres.history[k][i] << '\n';
  } else {
    json doc = summary;
    json hist = json::array();
    for (std::size_t k = 0; k < r.gmres.history.size(); ++k)
      for (std::size_t i = 0; i < r.gmres.history[k].size(); ++i)
        hist.push_back({{"iter", k + 1}, {"rhs", i}, {"relnorm", r.gmres.history[k][i]}});
    doc["history"] = hist;
    *sink << doc.dump(2) << '\n';
  }
  return 0;
}

int oracle_check(const RunConfig& cfg, const OracleCheckOptions& opt, std::ostream& out) {
  begin("oracle-check", cfg, out);
  apply_threads(cfg);
  Problem p = make_problem(cfg);
  if (opt.corrupt_gauge) {
    // stretch one link so it leaves SU(3)
    Complex* u = p.gauge.link(0, 0);
    for (int k = 0; k < 9; ++k) u[k] *= 1.05;
  }
  const DiracParams params{cfg.m0};
  const WilsonDirac d(p.geom, p.gauge, p.clover, params);

  json suites = json::array();
  bool all = true;
  auto record = [&](const std::string& name, double value, double tol) {
    const bool ok = value <= tol;
    all = all && ok;
    suites.push_back({{"name", name}, {"passed", ok}, {"value", value}, {"tolerance", tol}});
  };

  const LinkDefects defects = check_links(p.gauge);
  record("gauge-unitarity", defects.max_unitarity, 1e-12);
  record("gauge-determinant", defects.max_det_error, 1e-12);

  const oracle::DenseMatrix dense = oracle::assemble_dirac(p.geom, p.gauge, p.clover, params);
  for (int b : {1, 8}) {
    for (Layout l : {Layout::column_major, Layout::row_major}) {
      BlockSpinorField psi(p.geom.n_sites(), kSpinorComponents, {l, b});
      fill_gaussian(psi, source_seed(cfg));
      const BlockSpinorField eta = d.apply(psi);
      double worst = 0.0;
      for (int i = 0; i < b; ++i) {
        const oracle::DenseVector ref = dense * oracle::to_dense(psi, i);
        worst = std::max(worst, (oracle::to_dense(eta, i) - ref).norm() / ref.norm());
      }
      record("dirac-dense b=" + std::to_string(b) + " layout=" + std::to_string(static_cast<int>(l)),
             worst, 1e-12);
    }
  }

  {
    const LatticeGeometry& g = p.geom;
    const GaugeField unit = gen_gauge(g, GaugeMode::unit, 0);
    const CloverField zero = gen_clover(g, CloverMode::zero, 0.0, 0);
    const WilsonDirac free(g, unit, zero, params);
    BlockSpinorField psi(g.n_sites(), kSpinorComponents, {Layout::column_major, 1});
    for (std::size_t x = 0; x < g.n_sites(); ++x)
      for (int k = 0; k < kSpinorComponents; ++k) psi.at(x, k, 0) = Complex(1.0 + k, 0.5 * k);
    const BlockSpinorField eta = free.apply(psi);
    double worst = 0.0;
    for (std::size_t x = 0; x < g.n_sites(); ++x)
      for (int k = 0; k < kSpinorComponents; ++k)
        worst = std::max(worst, std::abs(eta.at(x, k, 0) - cfg.m0 * psi.at(x, k, 0)) /
                                    std::abs(psi.at(x, k, 0)));
    record("free-field", worst, 1e-14);
  }

  {
    const SchurOperator s(d);
    const oracle::DenseMatrix schur = oracle::assemble_schur(p.geom, p.gauge, p.clover, params);
    BlockSpinorField v(s.oe().half_sites(), kSpinorComponents, {Layout::column_major, 1});
    fill_gaussian(v, source_seed(cfg));
    const oracle::DenseVector ref = schur * oracle::to_dense(v, 0);
    record("schur-dense", (oracle::to_dense(s.apply(v), 0) - ref).norm() / ref.norm(), 1e-12);
  }

  Extents grid = cfg.grid;
  if (!is_split(grid) && cfg.dims[0] % 4 == 0) grid = {2, 1, 1, 1};
  if (is_split(grid)) {
    DistributedDirac dd(p.geom, p.gauge, p.clover, params, grid);
    BlockSpinorField psi(p.geom.n_sites(), kSpinorComponents, {Layout::column_major, 2});
    fill_gaussian(psi, source_seed(cfg));
    const BlockSpinorField ref = d.apply(psi);
    const BlockSpinorField got = dd.apply(psi, ExecutionMode::concurrent);
    double worst = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k)
      worst = std::max(worst, std::abs(ref.data()[k] - got.data()[k]));
    record("multi-rank grid=" + to_string(grid), worst, 0.0);
  }

  Payload sink(cfg.output_path, out);
  *sink << json{{"passed", all}, {"suites", suites}}.dump(2) << '\n';
  if (!all) {
    for (const auto& s : suites)
      if (!s["passed"].get<bool>()) std::cerr << "FAILED suite: " << s["name"].get<std::string>() << '\n';
  }
  return all ? 0 : 2;
}

int stream(const RunConfig& cfg, const StreamOptions& opt, std::ostream& out) {
  begin("stream", cfg, out);
  if (!(opt.mb > 0.0)) throw ValidationError("stream: --mb must be positive");
  const StreamKind kind = stream_kind_from_string(opt.kind);
  const auto bytes = static_cast<std::size_t>(opt.mb * 1024.0 * 1024.0);
  const StreamResult r = stream_bench(kind, bytes, opt.repetitions, opt.threads);
  Payload sink(cfg.output_path, out);
  *sink << json{{"kind", to_string(r.kind)},
                {"array_bytes", r.array_bytes},
                {"repetitions", r.repetitions},
                {"threads", r.threads},
                {"best_seconds", r.best_seconds},
                {"bandwidth_gbs", r.bytes_per_second * 1e-9},
                {"validated", r.validated}}
                .dump(2)
        << '\n';
  return 0;
}

int roofline(const RunConfig& cfg, const RooflineOptions& opt, std::ostream& out) {
  begin("roofline", cfg, out);
  std::ifstream is(opt.in_path);
  if (!is) throw ValidationError("roofline: cannot open --in " + opt.in_path);
  json doc;
  try {
    // bench-dirac output starts with a header line; skip lines until the payload
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const auto first = text.find('\n');
    if (text.rfind("{\"command\"", 0) == 0 && first != std::string::npos) text = text.substr(first);
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("roofline: malformed runs file: ") + e.what());
  }
  const json& recs = doc.is_array() ? doc : doc.value("records", json::array());
  std::vector<PerfRecord> runs;
  for (const auto& r : recs) {
    if (!r.contains("b") || !r.contains("layout") || !r.contains("gflops"))
      throw ValidationError("roofline: every record needs b, layout and gflops");
    runs.push_back({r["b"].get<int>(), layout_from_int(r["layout"].get<int>()),
                    r["gflops"].get<double>()});
  }
  double triad = opt.triad_bw_gbs * 1e9;
  if (!(triad > 0.0)) triad = stream_bench(StreamKind::triad, 64u << 20, 5, cfg.threads).bytes_per_second;
  const auto rows = roofline_report(runs, {triad, 0.0});
  if (!opt.out_path.empty()) {
    std::ofstream os(opt.out_path);
    if (!os) throw ValidationError("roofline: cannot open --out " + opt.out_path);
    write_roofline_csv(os, rows);
    out << roofline_json(rows) << '\n';
  } else {
    write_roofline_csv(out, rows);
  }
  for (const auto& r : rows)
    if (r.exceeds_model)
      std::cerr << "note: b=" << r.b << " layout=" << static_cast<int>(r.layout)
                << " exceeds the bandwidth ceiling (arch_eff " << r.arch_eff << ")\n";
  return 0;
}

int cost_model(const RunConfig& cfg, const CostModelOptions& opt, std::ostream& out) {
  begin("cost-model", cfg, out);
  using namespace lqml::cost;
  const Strategy s = strategy_from_string(opt.strategy);
  CostWeights w;
  if (opt.weights == "uniform" || opt.weights == "override") {
    w = CostWeights::preset(opt.weights);
  } else {
    std::ifstream is(opt.weights);
    if (!is) throw ValidationError("cost-model: unknown weights '" + opt.weights + "'");
    std::map<std::string, double> m;
    try {
      m = json::parse(is).get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
      throw ValidationError(std::string("cost-model: malformed weights file: ") + e.what());
    }
    w = CostWeights::from_map(m);
  }

  // A and M are fixed pseudo-random data; only the instruction stream matters.
  Rng rng(cfg.seed);
  auto draw = [&](int n) {
    std::vector<Complex> v(n);
    for (auto& z : v) z = {rng.gaussian(), rng.gaussian()};
    return v;
  };
  const auto av = draw(9);
  std::array<Complex, 9> a{};
  std::copy(av.begin(), av.end(), a.begin());
  auto run = [&](int b) {
    const auto r = run_kernel(s, a, draw(3 * b), b, opt.svl);
    json h = json::object();
    for (const auto& [name, count] : r.histogram.as_map()) h[name] = count;
    h["total_cost"] = cost::cost(r.histogram, w);
    return h;
  };

  json doc = {{"strategy", to_string(s)}, {"svl", opt.svl}, {"weights", opt.weights},
              {"b", opt.b}, {"histogram", run(opt.b)}};
  if (opt.b2) {
    doc["b2"] = *opt.b2;
    doc["iters"] = opt.iters;
    doc["histogram_b2"] = run(*opt.b2);
    doc["delta_cost"] = delta_cost(s, opt.b, *opt.b2, opt.iters, opt.svl, w);
  }
  if (!opt.out_path.empty()) {
    std::ofstream os(opt.out_path);
    if (!os) throw ValidationError("cost-model: cannot open --out " + opt.out_path);
    os << doc.dump(2) << '\n';
  }
  Payload sink(cfg.output_path, out);
  *sink << doc.dump(2) << '\n';
  return 0;
}

int gen_fields(const RunConfig& cfg, const GenFieldsOptions& opt, std::ostream& out) {
  begin("gen-fields", cfg, out);
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);
  const Problem p = make_problem(cfg);
  BlockSpinorField src(p.geom.n_sites(), kSpinorComponents, {cfg.layouts.front(), cfg.b.front()});
  fill_gaussian(src, source_seed(cfg));
  const fs::path dir(opt.out_dir);
  const std::string gauge = (dir / "gauge.lqmg").string();
  const std::string clover = (dir / "clover.lqmc").string();
  const std::string source = (dir / "source.lqms").string();
  save_gauge(gauge, cfg.dims, p.gauge);
  save_clover(clover, cfg.dims, p.clover);
  save_spinor(source, cfg.dims, src);
  Payload sink(cfg.output_path, out);
  *sink << json{{"gauge", {{"path", gauge}, {"checksum", checksum(p.gauge.data())}}},
                {"clover", {{"path", clover}, {"checksum", checksum(p.clover.data())}}},
                {"source", {{"path", source}, {"checksum", checksum(src.data())}}}}
                .dump(2)
        << '\n';
  return 0;
}

}  // namespace lqml::cli
