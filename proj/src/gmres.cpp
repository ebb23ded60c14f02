#include "lqml/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lqml/errors.hpp"

namespace lqml {

void GmresConfig::validate() const {
  if (restart_len < 1) throw ValidationError("gmres: restart_len must be >= 1");
  if (restarts < 1) throw ValidationError("gmres: restarts must be >= 1");
  if (!(tol > 0.0)) throw ValidationError("gmres: tol must be > 0");
}

// ------------------------------------------------------------ least squares

void HessenbergLsq::reset(int max_cols, Complex gamma0) {
  max_cols_ = max_cols;
  cols_ = 0;
  r_.assign(static_cast<std::size_t>(max_cols + 1) * max_cols, Complex{});
  c_.assign(max_cols, 0.0);
  s_.assign(max_cols, Complex{});
  gamma_.assign(max_cols + 1, Complex{});
  gamma_[0] = gamma0;
}

double HessenbergLsq::add_column(const std::vector<Complex>& h) {
  const int j = cols_;
  if (j >= max_cols_) throw ContractViolation("HessenbergLsq: no room for another column");
  if (static_cast<int>(h.size()) != j + 2) {
    throw ContractViolation("HessenbergLsq: column " + std::to_string(j) + " needs " +
                            std::to_string(j + 2) + " entries");
  }
  Complex* col = r_.data() + static_cast<std::size_t>(j) * (max_cols_ + 1);
  std::copy(h.begin(), h.end(), col);

  // rotations from earlier columns: [c s; -conj(s) c]
  for (int k = 0; k < j; ++k) {
    const Complex a = col[k];
    const Complex b = col[k + 1];
    col[k] = c_[k] * a + s_[k] * b;
    col[k + 1] = -std::conj(s_[k]) * a + c_[k] * b;
  }

  const Complex a = col[j];
  const Complex b = col[j + 1];
  const double rho = std::hypot(std::abs(a), std::abs(b));
  if (rho == 0.0) {
    c_[j] = 1.0;
    s_[j] = 0.0;
  } else if (std::abs(a) == 0.0) {
    c_[j] = 0.0;
    s_[j] = std::conj(b) / std::abs(b);
  } else {
    const Complex phase = a / std::abs(a);
    c_[j] = std::abs(a) / rho;
    s_[j] = phase * std::conj(b) / rho;
  }
  col[j] = c_[j] * a + s_[j] * b;
  col[j + 1] = 0.0;

  gamma_[j + 1] = -std::conj(s_[j]) * gamma_[j];
  gamma_[j] = c_[j] * gamma_[j];
  ++cols_;
  return std::abs(gamma_[j + 1]);
}

std::vector<Complex> HessenbergLsq::solve() const {
  const int n = cols_;
  std::vector<Complex> y(n);
  for (int r = n - 1; r >= 0; --r) {
    Complex s = gamma_[r];
    for (int c = r + 1; c < n; ++c) s -= r_[static_cast<std::size_t>(c) * (max_cols_ + 1) + r] * y[c];
    const Complex d = r_[static_cast<std::size_t>(r) * (max_cols_ + 1) + r];
    if (d == Complex{}) {
      throw NumericalError("HessenbergLsq: zero diagonal in triangular factor at column " +
                           std::to_string(r));
    }
    y[r] = s / d;
  }
  return y;
}

double HessenbergLsq::residual() const { return std::abs(gamma_[cols_]); }

// ------------------------------------------------------------------ solver

BatchedGmres::BatchedGmres(LinearOperator op, GmresConfig cfg) : op_(std::move(op)), cfg_(cfg) {
  cfg_.validate();
}

std::vector<double> BatchedGmres::start_cycle(const BlockSpinorField& eta,
                                              const BlockSpinorField& x) {
  if (!eta.same_shape(x)) throw ValidationError("gmres: eta and x differ in shape");
  b_ = eta.block();
  const int m = cfg_.restart_len;
  if (eta_norm_.size() != static_cast<std::size_t>(b_)) {
    eta_norm_ = block_norms(eta);
    breakdown_.assign(b_, -1);
  }
  x_start_ = x;
  if (v_.size() != static_cast<std::size_t>(m + 1) || !v_[0].same_shape(eta)) {
    v_.assign(m + 1, BlockSpinorField(eta.sites(), eta.components(), eta.policy()));
  }

  // r = eta - A x
  BlockSpinorField& r = v_[0];
  op_(x, r);
  {
    auto rd = r.data();
    auto ed = eta.data();
    for (std::size_t n = 0; n < rd.size(); ++n) rd[n] = ed[n] - rd[n];
  }
  const std::vector<double> beta = block_norms(r);

  lsq_.assign(b_, HessenbergLsq(m));
  cols_.assign(b_, 0);
  frozen_.assign(b_, false);
  std::vector<Complex> scale(b_);
  std::vector<double> rel(b_);
  for (int i = 0; i < b_; ++i) {
    const double en = eta_norm_[i] > 0.0 ? eta_norm_[i] : 1.0;
    rel[i] = beta[i] / en;
    lsq_[i].reset(m, beta[i]);
    if (beta[i] <= kBreakdownFactor * en) {
      frozen_[i] = true;  // already solved
      scale[i] = 0.0;
    } else {
      scale[i] = 1.0 / beta[i];
    }
  }
  block_scale(scale, r);
  j_ = 0;
  return rel;
}

std::vector<double> BatchedGmres::arnoldi_step() {
  const int m = cfg_.restart_len;
  if (j_ >= m) throw ContractViolation("gmres: Arnoldi basis is full, start a new cycle");
  const int j = j_;
  BlockSpinorField& w = v_[j + 1];
  op_(v_[j], w);

  std::vector<std::vector<Complex>> h(b_, std::vector<Complex>(j + 2));
  std::vector<Complex> neg(b_);
  auto mgs_pass = [&](bool accumulate) {
    for (int p = 0; p <= j; ++p) {
      const std::vector<Complex> d = block_dot(v_[p], w, cfg_.dot);
      for (int i = 0; i < b_; ++i) {
        const Complex hp = frozen_[i] ? Complex{} : d[i];
        h[i][p] = accumulate ? h[i][p] + hp : hp;
        neg[i] = -hp;
      }
      block_axpy(neg, v_[p], w);
    }
  };
  mgs_pass(false);

  if (cfg_.reorthogonalize) {
    double worst = 0.0;
    const std::vector<double> wn = block_norms(w);
    for (int p = 0; p <= j; ++p) {
      const std::vector<Complex> d = block_dot(v_[p], w, cfg_.dot);
      for (int i = 0; i < b_; ++i) {
        if (!frozen_[i] && wn[i] > 0.0) worst = std::max(worst, std::abs(d[i]) / wn[i]);
      }
    }
    if (worst > kReorthogonalizeThreshold) {
      mgs_pass(true);
      ++reorth_;
    }
  }

  const std::vector<double> hn = block_norms(w);
  std::vector<Complex> scale(b_);
  std::vector<double> rel(b_);
  for (int i = 0; i < b_; ++i) {
    const double en = eta_norm_[i] > 0.0 ? eta_norm_[i] : 1.0;
    if (frozen_[i]) {
      scale[i] = 0.0;
      rel[i] = lsq_[i].residual() / en;
      continue;
    }
    const bool breakdown = hn[i] < kBreakdownFactor * en;
    h[i][j + 1] = breakdown ? 0.0 : hn[i];
    rel[i] = lsq_[i].add_column(h[i]) / en;
    cols_[i] = lsq_[i].cols();
    if (breakdown) {
      frozen_[i] = true;
      breakdown_[i] = j;
      scale[i] = 0.0;
    } else {
      scale[i] = 1.0 / hn[i];
    }
  }
  block_scale(scale, w);
  ++j_;
  return rel;
}

BlockSpinorField BatchedGmres::current_solution() const {
  BlockSpinorField x = x_start_;
  std::vector<std::vector<Complex>> y(b_);
  int kmax = 0;
  for (int i = 0; i < b_; ++i) {
    if (cols_[i] > 0) y[i] = lsq_[i].solve();
    kmax = std::max(kmax, cols_[i]);
  }
  std::vector<Complex> alpha(b_);
  for (int p = 0; p < kmax; ++p) {
    for (int i = 0; i < b_; ++i) alpha[i] = p < cols_[i] ? y[i][p] : Complex{};
    block_axpy(alpha, v_[p], x);
  }
  return x;
}

std::vector<double> BatchedGmres::gamma_residuals() const {
  std::vector<double> g(b_);
  for (int i = 0; i < b_; ++i) g[i] = lsq_[i].residual();
  return g;
}

double BatchedGmres::orthonormality_error() const {
  double worst = 0.0;
  for (int p = 0; p <= j_; ++p) {
    for (int q = p; q <= j_; ++q) {
      const std::vector<Complex> d = block_dot(v_[p], v_[q], cfg_.dot);
      for (int i = 0; i < b_; ++i) {
        // basis vectors beyond a breakdown are zero by construction
        if (p > cols_[i] || q > cols_[i]) continue;
        if (breakdown_[i] >= 0 && q > breakdown_[i]) continue;
        const double target = p == q ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(d[i] - target));
      }
    }
  }
  return worst;
}

GmresResult BatchedGmres::solve(const BlockSpinorField& eta, const BlockSpinorField& x0) {
  GmresResult res;
  eta_norm_.clear();
  reorth_ = 0;
  BlockSpinorField x = x0;
  const int m = cfg_.restart_len;
  const auto max_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };

  for (int cycle = 0; cycle < cfg_.restarts; ++cycle) {
    const std::vector<double> rel0 = start_cycle(eta, x);
    if (!cfg_.fixed_iterations && max_of(rel0) < cfg_.tol) {
      res.converged = true;
      break;
    }
    ++res.cycles;
    std::vector<double> rel = rel0;
    for (int j = 0; j < m; ++j) {
      rel = arnoldi_step();
      res.history.push_back(rel);
      ++res.iterations;
      if (!cfg_.fixed_iterations && max_of(rel) < cfg_.tol) break;
    }
    x = current_solution();
    for (int i = 0; i < b_; ++i) {
      if (rel[i] >= cfg_.tol && rel[i] >= rel0[i]) res.stagnated = true;
    }
    if (!cfg_.fixed_iterations && max_of(rel) < cfg_.tol) {
      res.converged = true;
      break;
    }
  }

  // explicit final residual
  BlockSpinorField r(eta.sites(), eta.components(), eta.policy());
  op_(x, r);
  {
    auto rd = r.data();
    auto ed = eta.data();
    for (std::size_t n = 0; n < rd.size(); ++n) rd[n] = ed[n] - rd[n];
  }
  res.final_relres = block_norms(r);
  for (int i = 0; i < b_; ++i) {
    if (eta_norm_[i] > 0.0) res.final_relres[i] /= eta_norm_[i];
  }
  if (cfg_.fixed_iterations) res.converged = max_of(res.final_relres) < cfg_.tol;
  res.breakdown_step = breakdown_;
  res.reorthogonalizations = reorth_;
  res.x = std::move(x);
  return res;
}

GmresResult BatchedGmres::solve(const BlockSpinorField& eta) {
  BlockSpinorField x0(eta.sites(), eta.components(), eta.policy());
  return solve(eta, x0);
}

double batched_vs_independent_audit(const LinearOperator& op, const BlockSpinorField& eta,
                                    const GmresConfig& cfg) {
  BatchedGmres batched(op, cfg);
  const GmresResult all = batched.solve(eta);
  double worst = 0.0;
  for (int i = 0; i < eta.block(); ++i) {
    BatchedGmres single(op, cfg);
    const GmresResult one = single.solve(extract_rhs(eta, i));
    const std::size_t n = std::min(all.history.size(), one.history.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double a = all.history[k][i];
      const double s = one.history[k][0];
      const double denom = std::max(std::abs(s), 1e-300);
      worst = std::max(worst, std::abs(a - s) / denom);
    }
  }
  return worst;
}

}  // namespace lqml
