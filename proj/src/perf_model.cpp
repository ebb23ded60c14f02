#include "lqml/perf_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include <omp.h>

#include "json.hpp"
#include "lqml/errors.hpp"

namespace lqml {

double arithmetic_intensity(int b) {
  if (b < 1) throw ValidationError("arithmetic_intensity: b must be >= 1");
  return 2574.0 * b / ((168.0 * b + 114.0) * 16.0);
}

double theoretical_perf(double bandwidth, int b) {
  if (!(bandwidth > 0.0)) throw ValidationError("theoretical_perf: bandwidth must be positive");
  return bandwidth * arithmetic_intensity(b);
}

double arch_efficiency(double measured, double theoretical) {
  if (!(theoretical > 0.0)) throw ValidationError("arch_efficiency: theoretical must be positive");
  if (measured < 0.0) throw ValidationError("arch_efficiency: measured must be >= 0");
  return measured / theoretical;
}

double effective_bandwidth(const CounterSample& s) {
  if (!(s.cycles > 0.0)) throw ValidationError("effective_bandwidth: cycles must be positive");
  if (s.l2_refill < 0 || s.l2_writeback < 0 || s.frequency < 0 || s.cache_line < 0 ||
      s.ranks < 0) {
    throw ValidationError("effective_bandwidth: counters must be nonnegative");
  }
  return (s.l2_refill + s.l2_writeback) * s.cache_line * s.frequency / s.cycles * s.ranks;
}

Ratio read_write_ratio(int b) {
  if (b < 1) throw ValidationError("read_write_ratio: b must be >= 1");
  return {204 * static_cast<std::int64_t>(b) + 330, 204 * static_cast<std::int64_t>(b)};
}

std::string to_string(StreamKind k) {
  switch (k) {
    case StreamKind::copy: return "copy";
    case StreamKind::scale: return "scale";
    case StreamKind::add: return "add";
    case StreamKind::triad: return "triad";
  }
  return "?";
}

StreamKind stream_kind_from_string(const std::string& s) {
  for (StreamKind k : {StreamKind::copy, StreamKind::scale, StreamKind::add, StreamKind::triad}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown stream kind '" + s + "' (copy, scale, add, triad)");
}

int stream_arrays(StreamKind k) {
  return k == StreamKind::copy || k == StreamKind::scale ? 2 : 3;
}

StreamResult stream_bench(StreamKind kind, std::size_t array_bytes, int repetitions,
                          int threads) {
  if (repetitions < 1) throw ValidationError("stream_bench: repetitions must be >= 1");
  const std::size_t n = array_bytes / sizeof(double);
  if (n == 0) throw ValidationError("stream_bench: array must hold at least one double");
  const int saved_threads = omp_get_max_threads();
  if (threads > 0) omp_set_num_threads(threads);

  std::vector<double> a(n), b(n), c(n);
  const long long ln = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < ln; ++i) {
    a[i] = 1.0;
    b[i] = 2.0;
    c[i] = 0.5;
  }
  const double q = 3.0;
  double best = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    switch (kind) {
      case StreamKind::copy:
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < ln; ++i) c[i] = a[i];
        break;
      case StreamKind::scale:
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < ln; ++i) b[i] = q * c[i];
        break;
      case StreamKind::add:
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < ln; ++i) c[i] = a[i] + b[i];
        break;
      case StreamKind::triad:
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < ln; ++i) a[i] = b[i] + q * c[i];
        break;
    }
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  // Every kernel is idempotent on its initial data, so the expected values
  // after any number of repetitions are known in closed form.
  double ea = 1.0, eb = 2.0, ec = 0.5;
  switch (kind) {
    case StreamKind::copy: ec = ea; break;
    case StreamKind::scale: eb = q * ec; break;
    case StreamKind::add: ec = ea + eb; break;
    case StreamKind::triad: ea = eb + q * ec; break;
  }
  bool ok = true;
  for (std::size_t i = 0; i < n && ok; ++i) ok = a[i] == ea && b[i] == eb && c[i] == ec;

  StreamResult r;
  r.kind = kind;
  r.array_bytes = n * sizeof(double);
  r.repetitions = repetitions;
  r.threads = threads > 0 ? threads : saved_threads;
  r.best_seconds = best;
  r.bytes_per_second =
      best > 0.0 ? static_cast<double>(stream_arrays(kind)) * r.array_bytes / best : 0.0;
  r.validated = ok;
  if (threads > 0) omp_set_num_threads(saved_threads);
  if (!ok) throw NumericalError("stream_bench: " + to_string(kind) + " produced wrong values");
  return r;
}

std::vector<RooflineRow> roofline_report(const std::vector<PerfRecord>& runs,
                                         const RooflineInputs& in) {
  std::vector<RooflineRow> rows;
  rows.reserve(runs.size());
  for (const PerfRecord& p : runs) {
    RooflineRow r;
    r.b = p.b;
    r.layout = p.layout;
    r.ai = arithmetic_intensity(p.b);
    r.gflops = p.gflops;
    r.theor_gflops = theoretical_perf(in.triad_bw, p.b) * 1e-9;
    r.arch_eff = arch_efficiency(p.gflops, r.theor_gflops);
    r.exceeds_model = r.arch_eff > 1.0;
    rows.push_back(r);
  }
  return rows;
}

void write_roofline_csv(std::ostream& os, const std::vector<RooflineRow>& rows) {
  os << kRooflineCsvHeader << '\n';
  const auto old_prec = os.precision(10);
  for (const RooflineRow& r : rows) {
    os << r.b << ',' << to_string(r.layout) << ',' << r.ai << ',' << r.gflops << ','
       << r.theor_gflops << ',' << r.arch_eff << '\n';
  }
  os.precision(old_prec);
}

std::string roofline_json(const std::vector<RooflineRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RooflineRow& r : rows) {
    arr.push_back({{"b", r.b},
                   {"layout", static_cast<int>(r.layout)},
                   {"ai", r.ai},
                   {"gflops", r.gflops},
                   {"theor_gflops", r.theor_gflops},
                   {"arch_eff", r.arch_eff},
                   {"exceeds_model", r.exceeds_model}});
  }
  return arr.dump(2);
}

}  // namespace lqml
