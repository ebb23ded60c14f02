#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lqml/field.hpp"

namespace lqml::cost {

// A small abstract vector machine with a square accumulator tile, used to
// compare ways of computing O = A M for a 3x3 complex A and a 3xb complex M.
// Every instruction performs its arithmetic on the machine state and is
// recorded in a histogram; masked lanes cost the same as active ones.

enum class Opcode : std::uint8_t {
  LD1,         // contiguous vector load
  LD2,         // two-way deinterleaving load (re -> z0, im -> z1)
  ST1,         // contiguous store of a vector or tile row
  ST2,         // two-way interleaving store
  FMOPA,       // outer product accumulated into the tile
  FMLA,        // vector multiply-add by indexed element
  REVD,        // swap the two doubles of each 128-bit pair
  FNEG,        // predicated negate
  MOVA,        // tile row -> vector
  ZERO,        // clear the tile
  SCALAR_FMA,
  SCALAR_LD,
  SCALAR_ST,
  MOV,         // register move / zeroing idiom
};
constexpr int kOpcodeCount = 14;

const char* opcode_name(Opcode op);
Opcode opcode_from_name(const std::string& name);

struct InstructionHistogram {
  std::array<std::uint64_t, kOpcodeCount> counts{};

  std::uint64_t& operator[](Opcode op) { return counts[static_cast<int>(op)]; }
  std::uint64_t operator[](Opcode op) const { return counts[static_cast<int>(op)]; }
  std::uint64_t total() const;
  std::map<std::string, std::uint64_t> as_map() const;
};

struct CostWeights {
  std::array<double, kOpcodeCount> w{};

  double operator[](Opcode op) const { return w[static_cast<int>(op)]; }
  static CostWeights uniform();
  /// MOV free (register rename), stores 2, FMOPA 2, everything else 1.
  static CostWeights override_preset();
  /// Every opcode must be present; throws ValidationError otherwise.
  static CostWeights from_map(const std::map<std::string, double>& m);
  static CostWeights preset(const std::string& name);  // "uniform" | "override"
};

double cost(const InstructionHistogram& h, const CostWeights& w);

enum class Strategy : std::uint8_t { neg_a, neg_m, deinterleave_both, scalar };
const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);  // neg-a, neg-m, deinterleave-both, scalar
constexpr std::array<Strategy, 4> kAllStrategies = {Strategy::neg_a, Strategy::neg_m,
                                                    Strategy::deinterleave_both,
                                                    Strategy::scalar};

class AbstractMachine {
 public:
  static constexpr int kVectorRegs = 32;
  static constexpr int kScalarRegs = 32;

  explicit AbstractMachine(int svl_bits = 512);

  int svl_bits() const noexcept { return svl_; }
  /// Doubles per vector register and per tile row.
  int vl() const noexcept { return vl_; }

  const InstructionHistogram& histogram() const noexcept { return hist_; }
  void clear_histogram() { hist_ = {}; }

  const std::vector<double>& z(int r) const { return z_.at(r); }
  double tile(int row, int col) const { return za_[static_cast<std::size_t>(row) * vl_ + col]; }
  double x(int r) const { return x_.at(r); }

  // Vector instructions; `active` counts active lanes (or lane pairs for
  // LD2/ST2), inactive lanes read as zero and are not written to memory.
  void ld1(int zd, const double* p, int active);
  void ld2(int zre, int zim, const double* p, int pairs);
  void st1(int zs, double* p, int active);
  void st1_tile(int row, double* p, int active);
  void st2(int zre, int zim, double* p, int pairs);
  void revd(int zd, int zs);
  /// Negates the even lanes (0, 2, 4, ...) of zd.
  void fneg_even(int zd);
  void fmopa(int zn, int zm);
  void mova(int zd, int row);
  void zero_tile();
  /// zd (+|-)= zn * zm[lane]; `fresh` starts from zero instead of zd.
  void fmla_lane(int zd, int zn, int zm, int lane, bool negate, bool fresh);

  // Scalar instructions.
  void scalar_ld(int xd, const double* p);
  void scalar_st(int xs, double* p);
  void scalar_fma(int xd, int xa, int xb, bool negate);
  void mov_zero(int xd);

 private:
  void check_active(int active, int limit) const;

  int svl_;
  int vl_;
  InstructionHistogram hist_;
  std::vector<std::vector<double>> z_;
  std::vector<double> za_;
  std::vector<double> x_;
};

struct KernelResult {
  /// 3 x b, row-major.
  std::vector<Complex> out;
  InstructionHistogram histogram;
};

/// O = A M with A 3x3 row-major and M 3xb row-major, on a fresh histogram.
KernelResult run_kernel(Strategy s, const std::array<Complex, 9>& a, const std::vector<Complex>& m,
                        int b, AbstractMachine& machine);
KernelResult run_kernel(Strategy s, const std::array<Complex, 9>& a, const std::vector<Complex>& m,
                        int b, int svl_bits = 512);

/// Direct triple loop.
std::vector<Complex> reference_matmul(const std::array<Complex, 9>& a,
                                      const std::vector<Complex>& m, int b);

/// (cost(b2) - cost(b1)) * iterations.
double delta_cost(Strategy s, int b1, int b2, int iterations, int svl_bits,
                  const CostWeights& w);

/// Weighted cost of one call with block size b.
double call_cost(Strategy s, int b, int svl_bits, const CostWeights& w);

}  // namespace lqml::cost
