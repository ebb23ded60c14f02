#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "lqml/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitInternal = 3;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "key = value config file");
  cmd->add_option("-s,--set", c.overrides, "override one key, e.g. --set block.b=1,2,4")
      ->take_all();
}

lqml::RunConfig build_config(const Common& c) {
  lqml::RunConfig cfg = c.config_path.empty() ? lqml::RunConfig{} : lqml::RunConfig::load(c.config_path);
  for (const std::string& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw lqml::ValidationError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wilson-Dirac operator, batched GMRES and performance models"};
  app.set_version_flag("--version", lqml::kVersion);
  app.require_subcommand(1);

  Common common;
  namespace cli = lqml::cli;

  auto* bench = app.add_subcommand("bench-dirac", "time the operator over block sizes and layouts");
  add_common(bench, common);

  cli::SolveOptions solve_opt;
  auto* solve = app.add_subcommand("solve", "solve D x = eta for random sources");
  add_common(solve, common);
  solve->add_option("--solution", solve_opt.solution_path, "write x as a spinor snapshot");

  cli::OracleCheckOptions oracle_opt;
  auto* oracle = app.add_subcommand("oracle-check", "compare kernels with the dense oracle");
  add_common(oracle, common);
  oracle->add_flag("--corrupt-gauge", oracle_opt.corrupt_gauge,
                   "break unitarity of one link (negative control)");

  cli::StreamOptions stream_opt;
  auto* stream = app.add_subcommand("stream", "STREAM memory bandwidth kernels");
  add_common(stream, common);
  stream->add_option("--kind", stream_opt.kind, "copy | scale | add | triad");
  stream->add_option("--mb", stream_opt.mb, "array size in MiB");
  stream->add_option("--threads", stream_opt.threads, "0 = OpenMP default");
  stream->add_option("--reps", stream_opt.repetitions, "timed repetitions");

  cli::RooflineOptions roof_opt;
  auto* roof = app.add_subcommand("roofline", "roofline table from bench-dirac records");
  add_common(roof, common);
  roof->add_option("--in", roof_opt.in_path, "bench-dirac JSON output")->required();
  roof->add_option("--triad-bw", roof_opt.triad_bw_gbs, "Triad bandwidth in GB/s (measured if 0)");
  roof->add_option("--out", roof_opt.out_path, "CSV output path");

  cli::CostModelOptions cost_opt;
  auto* cost = app.add_subcommand("cost-model", "instruction cost of small complex matmuls");
  add_common(cost, common);
  cost->add_option("--strategy", cost_opt.strategy, "neg-a | neg-m | deinterleave-both | scalar");
  cost->add_option("--b", cost_opt.b, "block size");
  cost->add_option("--b2", cost_opt.b2, "second block size for a delta");
  cost->add_option("--svl", cost_opt.svl, "vector length in bits");
  cost->add_option("--iters", cost_opt.iters, "iterations for the delta");
  cost->add_option("--weights", cost_opt.weights, "uniform | override | path to JSON weights");
  cost->add_option("--out", cost_opt.out_path, "histogram JSON path");

  cli::GenFieldsOptions gen_opt;
  auto* gen = app.add_subcommand("gen-fields", "write gauge, clover and source snapshots");
  add_common(gen, common);
  gen->add_option("--out-dir", gen_opt.out_dir, "target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    const lqml::RunConfig cfg = build_config(common);
    std::ostream& out = std::cout;
    if (*bench) return cli::bench_dirac(cfg, out);
    if (*solve) return cli::solve(cfg, solve_opt, out);
    if (*oracle) return cli::oracle_check(cfg, oracle_opt, out);
    if (*stream) return cli::stream(cfg, stream_opt, out);
    if (*roof) return cli::roofline(cfg, roof_opt, out);
    if (*cost) return cli::cost_model(cfg, cost_opt, out);
    if (*gen) return cli::gen_fields(cfg, gen_opt, out);
  } catch (const lqml::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const lqml::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
