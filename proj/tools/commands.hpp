#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "lqml/config.hpp"

namespace lqml::cli {

// Each command writes a one-line JSON header, then its payload, to `out`
// (payload goes to cfg.output_path instead when that is set). Commands throw
// ValidationError / NumericalError; exit-code mapping happens in main.

/// Sweeps every (b, layout) in the config; adds per-rank wait/compute times
/// when ranks.grid splits the lattice.
int bench_dirac(const RunConfig& cfg, std::ostream& out);

struct SolveOptions {
  std::string solution_path;  // optional spinor snapshot of x
};
int solve(const RunConfig& cfg, const SolveOptions& opt, std::ostream& out);

struct OracleCheckOptions {
  bool corrupt_gauge = false;
};
/// Returns 0 when every suite passes, 2 otherwise.
int oracle_check(const RunConfig& cfg, const OracleCheckOptions& opt, std::ostream& out);

struct StreamOptions {
  std::string kind = "triad";
  double mb = 64.0;
  int threads = 0;
  int repetitions = 10;
};
int stream(const RunConfig& cfg, const StreamOptions& opt, std::ostream& out);

struct RooflineOptions {
  std::string in_path;
  double triad_bw_gbs = 0.0;
  std::string out_path;  // csv; stdout when empty
};
int roofline(const RunConfig& cfg, const RooflineOptions& opt, std::ostream& out);

struct CostModelOptions {
  std::string strategy = "neg-a";
  int b = 8;
  std::optional<int> b2;
  int svl = 512;
  int iters = 100;
  std::string weights = "uniform";  // preset name or path to a JSON {opcode: weight}
  std::string out_path;
};
int cost_model(const RunConfig& cfg, const CostModelOptions& opt, std::ostream& out);

struct GenFieldsOptions {
  std::string out_dir = ".";
};
int gen_fields(const RunConfig& cfg, const GenFieldsOptions& opt, std::ostream& out);

/// The header line every command prints first.
std::string header_json(const std::string& command, const RunConfig& cfg);

}  // namespace lqml::cli
