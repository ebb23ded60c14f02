#include "lqml/bench.hpp"

#include <algorithm>
#include <cstring>

#include "lqml/errors.hpp"
#include "lqml/perf_model.hpp"

namespace lqml {

std::uint64_t checksum(std::span<const Complex> data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t i = 0; i < data.size_bytes(); ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

BenchRecord bench_dirac(const WilsonDirac& d, int b, Layout layout, int warmup, int repetitions,
                        std::uint64_t seed) {
  if (b < 1) throw ValidationError("bench_dirac: b must be >= 1");
  if (warmup < 0 || repetitions < 1) {
    throw ValidationError("bench_dirac: need warmup >= 0 and repetitions >= 1");
  }
  const std::size_t n = d.geometry().n_sites();
  BlockSpinorField psi(n, kSpinorComponents, {layout, b});
  fill_gaussian(psi, seed);
  BlockSpinorField eta(n, kSpinorComponents, psi.policy());
  for (int i = 0; i < warmup; ++i) d.apply(psi, eta);
  std::vector<double> times;
  times.reserve(repetitions);
  for (int i = 0; i < repetitions; ++i) times.push_back(d.apply(psi, eta).seconds);
  std::sort(times.begin(), times.end());
  const std::size_t m = times.size();
  const double median = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);

  BenchRecord r;
  r.b = b;
  r.layout = layout;
  r.sites = n;
  r.repetitions = repetitions;
  r.median_seconds = median;
  r.min_seconds = times.front();
  r.gflops = median > 0.0 ? 2574.0 * b * static_cast<double>(n) / median * 1e-9 : 0.0;
  r.ai = arithmetic_intensity(b);
  r.input_checksum = checksum(psi.data());
  return r;
}

}  // namespace lqml
