#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lqml/field.hpp"

namespace lqml {

/// Flops per byte of one operator application with b right-hand sides:
/// 2574 b / ((168 b + 114) * 16).
double arithmetic_intensity(int b);
/// Bandwidth-bound ceiling in flop/s for a bandwidth in byte/s.
double theoretical_perf(double bandwidth, int b);
/// measured / theoretical; 0 when measured is 0.
double arch_efficiency(double measured, double theoretical);

/// Cache counters of one measured run.
struct CounterSample {
  double l2_refill = 0.0;
  double l2_writeback = 0.0;
  double cycles = 0.0;
  double frequency = 0.0;  // Hz
  double cache_line = 256.0;  // bytes
  double ranks = 1.0;  // per-rank counters are multiplied by this
};

/// (refill + writeback) * line * f / cycles * ranks, in byte/s.
double effective_bandwidth(const CounterSample& s);

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
/// Modeled read-to-write ratio (204 b + 330) : 204 b.
Ratio read_write_ratio(int b);

enum class StreamKind : std::uint8_t { copy, scale, add, triad };
std::string to_string(StreamKind k);
StreamKind stream_kind_from_string(const std::string& s);
/// Arrays touched per element: 2 for copy/scale, 3 for add/triad.
int stream_arrays(StreamKind k);

struct StreamResult {
  StreamKind kind = StreamKind::triad;
  std::size_t array_bytes = 0;
  int repetitions = 0;
  int threads = 1;
  double best_seconds = 0.0;
  double bytes_per_second = 0.0;
  bool validated = false;
};

/// STREAM-style kernel over double arrays of array_bytes each:
///   copy  c = a        scale b = q c
///   add   c = a + b    triad a = b + q c
/// Reports the best of `repetitions` timed runs and checks the array
/// contents afterwards. threads <= 0 keeps the OpenMP default.
StreamResult stream_bench(StreamKind kind, std::size_t array_bytes, int repetitions,
                          int threads = 0);

struct RooflineInputs {
  double triad_bw = 0.0;  // byte/s
  double copy_bw = 0.0;   // byte/s, informational
};

struct PerfRecord {
  int b = 1;
  Layout layout = Layout::column_major;
  double gflops = 0.0;
};

struct RooflineRow {
  int b = 1;
  Layout layout = Layout::column_major;
  double ai = 0.0;
  double gflops = 0.0;
  double theor_gflops = 0.0;
  double arch_eff = 0.0;
  /// arch_eff above 1: the measurement beats the bandwidth model.
  bool exceeds_model = false;
};

std::vector<RooflineRow> roofline_report(const std::vector<PerfRecord>& runs,
                                         const RooflineInputs& in);

inline constexpr const char* kRooflineCsvHeader = "b,layout,ai,gflops,theor_gflops,arch_eff";
void write_roofline_csv(std::ostream& os, const std::vector<RooflineRow>& rows);
std::string roofline_json(const std::vector<RooflineRow>& rows);

}  // namespace lqml
