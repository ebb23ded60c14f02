#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lqml/field.hpp"
#include "lqml/gauge.hpp"
#include "lqml/geometry.hpp"

namespace lqml {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a CLI run depends on. Text form is one `key = value` per line
/// with `#` comments; unknown keys are rejected.
///
///   lattice.dims            4,4,4,4
///   ranks.grid              1,1,1,1
///   block.b                 1          (bench-dirac accepts a list: 1,2,4)
///   block.layout            1          (1 or 2, list accepted likewise)
///   dirac.m0                -0.5
///   gauge.mode              random     (random | unit)
///   clover.mode             random     (random | zero)
///   clover.scale            0.1
///   seed                    42
///   threads                 0          (0 = OpenMP default)
///   solver.tol              1e-8
///   solver.restart_len      10
///   solver.restarts         10
///   solver.odd_even         false
///   solver.fixed_iterations false
///   bench.warmup            1
///   bench.repetitions       5
///   output.format           json       (json | csv)
///   output.path                        (empty = stdout)
struct RunConfig {
  Extents dims{4, 4, 4, 4};
  Extents grid{1, 1, 1, 1};
  std::vector<int> b{1};
  std::vector<Layout> layouts{Layout::column_major};
  double m0 = -0.5;
  GaugeMode gauge_mode = GaugeMode::random;
  CloverMode clover_mode = CloverMode::random_hermitian;
  double clover_scale = 0.1;
  std::uint64_t seed = 42;
  int threads = 0;
  double tol = 1e-8;
  int restart_len = 10;
  int restarts = 10;
  bool odd_even = false;
  bool fixed_iterations = false;
  int warmup = 1;
  int repetitions = 5;
  std::string output_format = "json";
  std::string output_path;

  /// Checks cross-field preconditions (even extents, grid divisibility, ...).
  void validate() const;

  /// Sets one key from its text value; throws ValidationError with the key
  /// name on bad input.
  void set(const std::string& key, const std::string& value);

  /// Every key with its current value, in canonical text form.
  std::map<std::string, std::string> to_map() const;
  /// Sorted `key = value` lines.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  static const std::vector<std::string>& keys();
};

std::uint64_t fnv1a64(const std::string& s);

}  // namespace lqml
