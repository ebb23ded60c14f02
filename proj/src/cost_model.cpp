#include "lqml/cost_model.hpp"

#include <algorithm>
#include <string>

#include "lqml/errors.hpp"

namespace lqml::cost {

namespace {

constexpr std::array<const char*, kOpcodeCount> kNames = {
    "LD1",  "LD2",  "ST1",  "ST2",        "FMOPA",     "FMLA",      "REVD",
    "FNEG", "MOVA", "ZERO", "SCALAR_FMA", "SCALAR_LD", "SCALAR_ST", "MOV"};

}  // namespace

const char* opcode_name(Opcode op) { return kNames[static_cast<int>(op)]; }

Opcode opcode_from_name(const std::string& name) {
  for (int i = 0; i < kOpcodeCount; ++i) {
    if (name == kNames[i]) return static_cast<Opcode>(i);
  }
  throw ValidationError("unknown opcode '" + name + "'");
}

std::uint64_t InstructionHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::map<std::string, std::uint64_t> InstructionHistogram::as_map() const {
  std::map<std::string, std::uint64_t> m;
  for (int i = 0; i < kOpcodeCount; ++i) m[kNames[i]] = counts[i];
  return m;
}

CostWeights CostWeights::uniform() {
  CostWeights c;
  c.w.fill(1.0);
  return c;
}

CostWeights CostWeights::override_preset() {
  CostWeights c = uniform();
  c.w[static_cast<int>(Opcode::MOV)] = 0.0;
  c.w[static_cast<int>(Opcode::ST1)] = 2.0;
  c.w[static_cast<int>(Opcode::ST2)] = 2.0;
  c.w[static_cast<int>(Opcode::SCALAR_ST)] = 2.0;
  c.w[static_cast<int>(Opcode::FMOPA)] = 2.0;
  return c;
}

CostWeights CostWeights::from_map(const std::map<std::string, double>& m) {
  CostWeights c;
  for (int i = 0; i < kOpcodeCount; ++i) {
    const auto it = m.find(kNames[i]);
    if (it == m.end()) throw ValidationError(std::string("cost weights: missing opcode ") + kNames[i]);
    if (it->second < 0.0) throw ValidationError(std::string("cost weights: negative weight for ") + kNames[i]);
    c.w[i] = it->second;
  }
  for (const auto& [k, v] : m) opcode_from_name(k);  // reject unknown names
  return c;
}

CostWeights CostWeights::preset(const std::string& name) {
  if (name == "uniform") return uniform();
  if (name == "override") return override_preset();
  throw ValidationError("unknown weight preset '" + name + "' (uniform, override)");
}

double cost(const InstructionHistogram& h, const CostWeights& w) {
  double c = 0.0;
  for (int i = 0; i < kOpcodeCount; ++i) c += static_cast<double>(h.counts[i]) * w.w[i];
  return c;
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::neg_a: return "neg-a";
    case Strategy::neg_m: return "neg-m";
    case Strategy::deinterleave_both: return "deinterleave-both";
    case Strategy::scalar: return "scalar";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  for (Strategy k : kAllStrategies) {
    if (s == to_string(k)) return k;
  }
  throw ValidationError("unknown strategy '" + s + "' (neg-a, neg-m, deinterleave-both, scalar)");
}

// ----------------------------------------------------------------- machine

AbstractMachine::AbstractMachine(int svl_bits) : svl_(svl_bits) {
  if (svl_bits < 128 || svl_bits > 2048 || (svl_bits & (svl_bits - 1)) != 0) {
    throw ValidationError("svl_bits must be one of 128, 256, 512, 1024, 2048 (got " +
                          std::to_string(svl_bits) + ")");
  }
  vl_ = svl_bits / 64;
  z_.assign(kVectorRegs, std::vector<double>(vl_, 0.0));
  za_.assign(static_cast<std::size_t>(vl_) * vl_, 0.0);
  x_.assign(kScalarRegs, 0.0);
}

void AbstractMachine::check_active(int active, int limit) const {
  if (active < 0 || active > limit) {
    throw ContractViolation("abstract machine: " + std::to_string(active) +
                            " active lanes exceed the limit " + std::to_string(limit));
  }
}

void AbstractMachine::ld1(int zd, const double* p, int active) {
  check_active(active, vl_);
  auto& r = z_.at(zd);
  for (int l = 0; l < vl_; ++l) r[l] = l < active ? p[l] : 0.0;
  ++hist_[Opcode::LD1];
}

void AbstractMachine::ld2(int zre, int zim, const double* p, int pairs) {
  check_active(pairs, vl_);
  auto& re = z_.at(zre);
  auto& im = z_.at(zim);
  for (int l = 0; l < vl_; ++l) {
    re[l] = l < pairs ? p[2 * l] : 0.0;
    im[l] = l < pairs ? p[2 * l + 1] : 0.0;
  }
  ++hist_[Opcode::LD2];
}

void AbstractMachine::st1(int zs, double* p, int active) {
  check_active(active, vl_);
  const auto& r = z_.at(zs);
  for (int l = 0; l < active; ++l) p[l] = r[l];
  ++hist_[Opcode::ST1];
}

void AbstractMachine::st1_tile(int row, double* p, int active) {
  check_active(active, vl_);
  for (int l = 0; l < active; ++l) p[l] = tile(row, l);
  ++hist_[Opcode::ST1];
}

void AbstractMachine::st2(int zre, int zim, double* p, int pairs) {
  check_active(pairs, vl_);
  const auto& re = z_.at(zre);
  const auto& im = z_.at(zim);
  for (int l = 0; l < pairs; ++l) {
    p[2 * l] = re[l];
    p[2 * l + 1] = im[l];
  }
  ++hist_[Opcode::ST2];
}

void AbstractMachine::revd(int zd, int zs) {
  const std::vector<double> s = z_.at(zs);
  auto& d = z_.at(zd);
  for (int l = 0; l + 1 < vl_; l += 2) {
    d[l] = s[l + 1];
    d[l + 1] = s[l];
  }
  ++hist_[Opcode::REVD];
}

void AbstractMachine::fneg_even(int zd) {
  auto& d = z_.at(zd);
  for (int l = 0; l < vl_; l += 2) d[l] = -d[l];
  ++hist_[Opcode::FNEG];
}

void AbstractMachine::fmopa(int zn, int zm) {
  const auto& n = z_.at(zn);
  const auto& m = z_.at(zm);
  for (int r = 0; r < vl_; ++r)
    for (int c = 0; c < vl_; ++c) za_[static_cast<std::size_t>(r) * vl_ + c] += n[r] * m[c];
  ++hist_[Opcode::FMOPA];
}

void AbstractMachine::mova(int zd, int row) {
  auto& d = z_.at(zd);
  for (int l = 0; l < vl_; ++l) d[l] = tile(row, l);
  ++hist_[Opcode::MOVA];
}

void AbstractMachine::zero_tile() {
  std::fill(za_.begin(), za_.end(), 0.0);
  ++hist_[Opcode::ZERO];
}

void AbstractMachine::fmla_lane(int zd, int zn, int zm, int lane, bool negate, bool fresh) {
  const auto& n = z_.at(zn);
  const double s = z_.at(zm).at(lane) * (negate ? -1.0 : 1.0);
  auto& d = z_.at(zd);
  for (int l = 0; l < vl_; ++l) d[l] = (fresh ? 0.0 : d[l]) + n[l] * s;
  ++hist_[Opcode::FMLA];
}

void AbstractMachine::scalar_ld(int xd, const double* p) {
  x_.at(xd) = *p;
  ++hist_[Opcode::SCALAR_LD];
}

void AbstractMachine::scalar_st(int xs, double* p) {
  *p = x_.at(xs);
  ++hist_[Opcode::SCALAR_ST];
}

void AbstractMachine::scalar_fma(int xd, int xa, int xb, bool negate) {
  x_.at(xd) += (negate ? -1.0 : 1.0) * x_.at(xa) * x_.at(xb);
  ++hist_[Opcode::SCALAR_FMA];
}

void AbstractMachine::mov_zero(int xd) {
  x_.at(xd) = 0.0;
  ++hist_[Opcode::MOV];
}

// ----------------------------------------------------------------- kernels

namespace {

// A stored column-major as interleaved doubles: column k is 6 contiguous
// doubles (re, im of A_0k, A_1k, A_2k).
std::array<double, 18> columns_of(const std::array<Complex, 9>& a) {
  std::array<double, 18> c{};
  for (int k = 0; k < 3; ++k)
    for (int r = 0; r < 3; ++r) {
      c[6 * k + 2 * r] = a[r * 3 + k].real();
      c[6 * k + 2 * r + 1] = a[r * 3 + k].imag();
    }
  return c;
}

double* as_doubles(std::vector<Complex>& v) { return reinterpret_cast<double*>(v.data()); }
const double* as_doubles(const std::vector<Complex>& v) {
  return reinterpret_cast<const double*>(v.data());
}

void require_tile(const AbstractMachine& mc, Strategy s) {
  if (mc.svl_bits() < 384) {
    throw ValidationError(std::string("strategy ") + to_string(s) +
                          " needs svl_bits >= 384 to hold a complex 3-vector (got " +
                          std::to_string(mc.svl_bits()) + ")");
  }
}

// Tile rows 2r / 2r+1 collect Re / Im of O row r. A column k (interleaved)
// and its pair-swapped, sign-adjusted copy are built once; each chunk of
// vl() complex columns of M is loaded deinterleaved.
void kernel_neg_a(const std::array<double, 18>& acol, const double* m, double* o, int b,
                  AbstractMachine& mc) {
  const int vl = mc.vl();
  for (int k = 0; k < 3; ++k) {
    mc.ld1(k, acol.data() + 6 * k, 6);   // z_k   = (re a0k, im a0k, re a1k, ...)
    mc.revd(3 + k, k);                   // z_3+k = (im a0k, re a0k, ...)
    mc.fneg_even(3 + k);                 //       = (-im a0k, re a0k, ...)
  }
  for (int j0 = 0; j0 < b; j0 += vl) {
    const int n = std::min(vl, b - j0);
    mc.zero_tile();
    for (int k = 0; k < 3; ++k) {
      mc.ld2(6, 7, m + 2 * (static_cast<std::size_t>(k) * b + j0), n);
      mc.fmopa(k, 6);      // rows: re a * re m, im a * re m
      mc.fmopa(3 + k, 7);  // rows: -im a * im m, re a * im m
    }
    for (int r = 0; r < 3; ++r) {
      mc.mova(8, 2 * r);
      mc.mova(9, 2 * r + 1);
      mc.st2(8, 9, o + 2 * (static_cast<std::size_t>(r) * b + j0), n);
    }
  }
}

// Tile row r collects O row r interleaved. M rows are loaded interleaved and
// the swapped/negated copy is formed per row and chunk; A columns are loaded
// deinterleaved once.
void kernel_neg_m(const std::array<double, 18>& acol, const double* m, double* o, int b,
                  AbstractMachine& mc) {
  const int vl = mc.vl();
  const int chunk = vl / 2;
  for (int k = 0; k < 3; ++k) mc.ld2(2 * k, 2 * k + 1, acol.data() + 6 * k, 3);
  for (int j0 = 0; j0 < b; j0 += chunk) {
    const int n = std::min(chunk, b - j0);
    mc.zero_tile();
    for (int k = 0; k < 3; ++k) {
      const double* row = m + 2 * (static_cast<std::size_t>(k) * b + j0);
      mc.ld1(6, row, 2 * n);  // (re m, im m, ...)
      mc.revd(7, 6);          // (im m, re m, ...)
      mc.fneg_even(7);        // (-im m, re m, ...)
      mc.fmopa(2 * k, 6);     // re a  x (re m, im m)
      mc.fmopa(2 * k + 1, 7); // im a  x (-im m, re m)
    }
    for (int r = 0; r < 3; ++r) {
      mc.st1_tile(r, o + 2 * (static_cast<std::size_t>(r) * b + j0), 2 * n);
    }
  }
}

// Vector FMA baseline in r-k-j order: the output row is stored after every k
// and reloaded for the next, as compiled loop nests tend to do.
void kernel_deinterleave_both(const std::array<double, 18>& acol, const double* m, double* o,
                              int b, AbstractMachine& mc) {
  const int vl = mc.vl();
  for (int k = 0; k < 3; ++k) mc.ld2(2 * k, 2 * k + 1, acol.data() + 6 * k, 3);
  for (int j0 = 0; j0 < b; j0 += vl) {
    const int n = std::min(vl, b - j0);
    for (int r = 0; r < 3; ++r) {
      double* orow = o + 2 * (static_cast<std::size_t>(r) * b + j0);
      for (int k = 0; k < 3; ++k) {
        const bool first = k == 0;
        if (!first) mc.ld2(8, 9, orow, n);
        mc.ld2(6, 7, m + 2 * (static_cast<std::size_t>(k) * b + j0), n);
        mc.fmla_lane(8, 6, 2 * k, r, false, first);      // re += re a * re m
        mc.fmla_lane(8, 7, 2 * k + 1, r, true, false);   // re -= im a * im m
        mc.fmla_lane(9, 7, 2 * k, r, false, first);      // im += re a * im m
        mc.fmla_lane(9, 6, 2 * k + 1, r, false, false);  // im += im a * re m
        mc.st2(8, 9, orow, n);
      }
    }
  }
}

void kernel_scalar(const std::array<double, 18>& acol, const double* m, double* o, int b,
                   AbstractMachine& mc) {
  // x0..x17: A (column k, row r) re at 6k + 2r, im at 6k + 2r + 1
  for (int i = 0; i < 18; ++i) mc.scalar_ld(i, acol.data() + i);
  constexpr int re = 18, im = 19, mre = 20, mim = 21;
  for (int r = 0; r < 3; ++r) {
    for (int j = 0; j < b; ++j) {
      mc.mov_zero(re);
      mc.mov_zero(im);
      for (int k = 0; k < 3; ++k) {
        const double* mkj = m + 2 * (static_cast<std::size_t>(k) * b + j);
        mc.scalar_ld(mre, mkj);
        mc.scalar_ld(mim, mkj + 1);
        const int ar = 6 * k + 2 * r;
        const int ai = ar + 1;
        mc.scalar_fma(re, ar, mre, false);
        mc.scalar_fma(re, ai, mim, true);
        mc.scalar_fma(im, ar, mim, false);
        mc.scalar_fma(im, ai, mre, false);
      }
      double* oij = o + 2 * (static_cast<std::size_t>(r) * b + j);
      mc.scalar_st(re, oij);
      mc.scalar_st(im, oij + 1);
    }
  }
}

}  // namespace

std::vector<Complex> reference_matmul(const std::array<Complex, 9>& a,
                                      const std::vector<Complex>& m, int b) {
  std::vector<Complex> o(static_cast<std::size_t>(3) * b);
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < b; ++j) {
      Complex s{};
      for (int k = 0; k < 3; ++k) s += a[r * 3 + k] * m[static_cast<std::size_t>(k) * b + j];
      o[static_cast<std::size_t>(r) * b + j] = s;
    }
  return o;
}

KernelResult run_kernel(Strategy s, const std::array<Complex, 9>& a, const std::vector<Complex>& m,
                        int b, AbstractMachine& machine) {
  if (b < 1) throw ValidationError("run_kernel: b must be a positive integer");
  if (m.size() != static_cast<std::size_t>(3) * b) {
    throw ValidationError("run_kernel: M must hold 3 x b values");
  }
  if (s == Strategy::neg_a || s == Strategy::neg_m) require_tile(machine, s);
  if (s == Strategy::deinterleave_both && machine.vl() < 3) {
    throw ValidationError("strategy deinterleave-both needs three lanes per register (svl_bits >= 256)");
  }
  machine.clear_histogram();
  KernelResult res;
  res.out.assign(static_cast<std::size_t>(3) * b, Complex{});
  const auto acol = columns_of(a);
  const double* mp = as_doubles(m);
  double* op = as_doubles(res.out);
  switch (s) {
    case Strategy::neg_a: kernel_neg_a(acol, mp, op, b, machine); break;
    case Strategy::neg_m: kernel_neg_m(acol, mp, op, b, machine); break;
    case Strategy::deinterleave_both: kernel_deinterleave_both(acol, mp, op, b, machine); break;
    case Strategy::scalar: kernel_scalar(acol, mp, op, b, machine); break;
  }
  res.histogram = machine.histogram();
  return res;
}

KernelResult run_kernel(Strategy s, const std::array<Complex, 9>& a, const std::vector<Complex>& m,
                        int b, int svl_bits) {
  AbstractMachine machine(svl_bits);
  return run_kernel(s, a, m, b, machine);
}

double call_cost(Strategy s, int b, int svl_bits, const CostWeights& w) {
  // Counts do not depend on values; any inputs will do.
  std::array<Complex, 9> a{};
  for (int i = 0; i < 9; ++i) a[i] = Complex(1.0 + i, -0.5 * i);
  std::vector<Complex> m(static_cast<std::size_t>(3) * b, Complex(1.0, 1.0));
  return cost(run_kernel(s, a, m, b, svl_bits).histogram, w);
}

double delta_cost(Strategy s, int b1, int b2, int iterations, int svl_bits,
                  const CostWeights& w) {
  if (iterations < 0) throw ValidationError("delta_cost: iterations must be >= 0");
  if (b1 == b2) return 0.0;
  if (b1 > b2) throw ValidationError("delta_cost: need b1 <= b2");
  return (call_cost(s, b2, svl_bits, w) - call_cost(s, b1, svl_bits, w)) * iterations;
}

}  // namespace lqml::cost
