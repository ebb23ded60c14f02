#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lqml/field.hpp"
#include "lqml/wilson_dirac.hpp"

namespace lqml {

/// Timing of repeated operator applications for one (b, layout) pair.
struct BenchRecord {
  int b = 1;
  Layout layout = Layout::column_major;
  std::size_t sites = 0;
  int repetitions = 0;
  double median_seconds = 0.0;
  double min_seconds = 0.0;
  /// 2574 b sites / median_seconds, in GFlop/s.
  double gflops = 0.0;
  double ai = 0.0;
  /// FNV-1a 64 of the input spinor bytes; equal seeds give equal checksums.
  std::uint64_t input_checksum = 0;
};

BenchRecord bench_dirac(const WilsonDirac& d, int b, Layout layout, int warmup, int repetitions,
                        std::uint64_t seed);

/// FNV-1a 64 over the raw bytes of a complex array.
std::uint64_t checksum(std::span<const Complex> data);

}  // namespace lqml
