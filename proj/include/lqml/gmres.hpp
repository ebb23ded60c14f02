#pragma once

#include <functional>
#include <vector>

#include "lqml/field.hpp"

namespace lqml {

/// y = A x on fields of any block size b.
using LinearOperator = std::function<void(const BlockSpinorField&, BlockSpinorField&)>;

struct GmresConfig {
  int restart_len = 10;
  int restarts = 10;
  double tol = 1e-8;
  /// Run exactly restarts * restart_len iterations regardless of tol.
  bool fixed_iterations = false;
  DotStrategy dot = DotStrategy::deferred_separation;
  /// Second Gram-Schmidt pass when a new basis vector loses orthogonality
  /// beyond kReorthogonalizeThreshold.
  bool reorthogonalize = false;

  void validate() const;
};

constexpr double kReorthogonalizeThreshold = 1e-8;
constexpr double kBreakdownFactor = 1e-14;

/// Least-squares problem min || gamma e_0 - H y || of one rhs, with the
/// upper Hessenberg H reduced to triangular form by Givens rotations as
/// columns arrive.
class HessenbergLsq {
 public:
  HessenbergLsq() = default;
  explicit HessenbergLsq(int max_cols) { reset(max_cols, 0.0); }

  void reset(int max_cols, Complex gamma0);
  /// Adds column j = cols(): h has j + 2 entries (h_0j .. h_{j+1,j}).
  /// Returns |gamma_{j+1}|, the residual norm of the updated problem.
  double add_column(const std::vector<Complex>& h);
  int cols() const noexcept { return cols_; }
  /// y of length cols() by back substitution. Throws NumericalError on a zero
  /// diagonal entry of the triangular factor.
  std::vector<Complex> solve() const;
  double residual() const;
  const std::vector<Complex>& gamma() const noexcept { return gamma_; }

 private:
  int max_cols_ = 0;
  int cols_ = 0;
  std::vector<Complex> r_;  // (max_cols + 1) x max_cols, column-major
  std::vector<double> c_;
  std::vector<Complex> s_;
  std::vector<Complex> gamma_;
};

struct GmresResult {
  BlockSpinorField x;
  /// history[k][i]: relative residual estimate of rhs i after iteration k + 1.
  std::vector<std::vector<double>> history;
  int iterations = 0;
  int cycles = 0;
  bool converged = false;
  /// Some rhs did not reduce its residual over a whole cycle.
  bool stagnated = false;
  /// Explicit ||eta_i - A x_i|| / ||eta_i|| after the last cycle.
  std::vector<double> final_relres;
  /// Arnoldi step at which each rhs hit a happy breakdown, or -1.
  std::vector<int> breakdown_step;
  int reorthogonalizations = 0;
};

/// Restarted GMRES run on b right-hand sides at once. Every rhs keeps its own
/// Krylov basis, Hessenberg matrix and rotations; only the kernels (operator,
/// dots, axpys) are batched. All rhs advance in lockstep until the largest
/// relative residual drops below tol.
class BatchedGmres {
 public:
  BatchedGmres(LinearOperator op, GmresConfig cfg);

  const GmresConfig& config() const noexcept { return cfg_; }

  GmresResult solve(const BlockSpinorField& eta, const BlockSpinorField& x0);
  GmresResult solve(const BlockSpinorField& eta);

  // Step-wise interface, used by solve() and by tests.

  /// Computes the true residual of x and normalizes it into V_0.
  /// Returns the per-rhs relative residuals.
  std::vector<double> start_cycle(const BlockSpinorField& eta, const BlockSpinorField& x);
  /// One Arnoldi step with modified Gram-Schmidt; returns |gamma_{j+1}| / ||eta|| per rhs.
  std::vector<double> arnoldi_step();
  /// x_start + V y for the current step count of each rhs.
  BlockSpinorField current_solution() const;
  /// |gamma_{j+1}| per rhs (absolute).
  std::vector<double> gamma_residuals() const;
  /// max |V_p^H V_q - delta_pq| over the current basis, per rhs, maximized.
  double orthonormality_error() const;
  int steps() const noexcept { return j_; }
  const HessenbergLsq& lsq(int rhs) const { return lsq_.at(rhs); }

 private:
  LinearOperator op_;
  GmresConfig cfg_;
  int b_ = 0;
  std::vector<double> eta_norm_;
  BlockSpinorField x_start_;
  std::vector<BlockSpinorField> v_;
  std::vector<HessenbergLsq> lsq_;
  std::vector<int> cols_;   // Hessenberg columns in use per rhs
  std::vector<bool> frozen_;
  std::vector<int> breakdown_;
  int j_ = 0;
  int reorth_ = 0;
};

/// Largest relative deviation between the residual histories of one batched
/// solve and b independent single-rhs solves, over their common iterations.
double batched_vs_independent_audit(const LinearOperator& op, const BlockSpinorField& eta,
                                    const GmresConfig& cfg);

}  // namespace lqml
