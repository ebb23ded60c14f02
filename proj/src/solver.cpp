#include "lqml/solver.hpp"

#include "lqml/odd_even.hpp"

namespace lqml {

std::vector<double> explicit_residuals(const WilsonDirac& d, const BlockSpinorField& eta,
                                       const BlockSpinorField& x) {
  BlockSpinorField r = d.apply(x);
  const int b = eta.block();
  block_scale(std::vector<Complex>(b, -1.0), r);
  block_axpy(std::vector<Complex>(b, 1.0), eta, r);
  std::vector<double> rn = block_norms(r);
  const std::vector<double> en = block_norms(eta);
  for (int i = 0; i < b; ++i) rn[i] = en[i] > 0.0 ? rn[i] / en[i] : rn[i];
  return rn;
}

WilsonSolveResult solve_wilson(const WilsonDirac& d, const BlockSpinorField& eta,
                               const GmresConfig& cfg, bool odd_even, Parity keep) {
  WilsonSolveResult out;
  out.odd_even = odd_even;
  if (!odd_even) {
    BatchedGmres g([&d](const BlockSpinorField& in, BlockSpinorField& o) { d.apply(in, o); }, cfg);
    out.gmres = g.solve(eta);
    out.x = out.gmres.x;
  } else {
    const SchurOperator s(d, keep);
    BatchedGmres g([&s](const BlockSpinorField& in, BlockSpinorField& o) { s.apply(in, o); }, cfg);
    out.gmres = g.solve(s.reduced_rhs(eta));
    out.x = s.reconstruct(out.gmres.x, eta);
  }
  out.explicit_relres = explicit_residuals(d, eta, out.x);
  return out;
}

}  // namespace lqml
