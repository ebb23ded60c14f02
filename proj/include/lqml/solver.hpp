#pragma once

#include <vector>

#include "lqml/gmres.hpp"
#include "lqml/wilson_dirac.hpp"

namespace lqml {

struct WilsonSolveResult {
  BlockSpinorField x;
  GmresResult gmres;
  /// ||eta_i - D x_i|| / ||eta_i|| on the full lattice, per rhs.
  std::vector<double> explicit_relres;
  bool odd_even = false;
};

/// Solves D x = eta with batched GMRES, either on the full lattice or on the
/// Schur complement of the kept parity followed by reconstruction of the
/// eliminated half. With odd_even the tolerance applies to the reduced system.
WilsonSolveResult solve_wilson(const WilsonDirac& d, const BlockSpinorField& eta,
                               const GmresConfig& cfg, bool odd_even,
                               Parity keep = Parity::even);

/// Explicit relative residuals ||eta_i - D x_i|| / ||eta_i||.
std::vector<double> explicit_residuals(const WilsonDirac& d, const BlockSpinorField& eta,
                                       const BlockSpinorField& x);

}  // namespace lqml
