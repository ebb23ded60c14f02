#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lqml/field.hpp"
#include "lqml/gauge.hpp"
#include "lqml/geometry.hpp"
#include "lqml/projectors.hpp"

namespace lqml {

/// Mass parameter of the operator; the lattice spacing is fixed to 1.
struct DiracParams {
  double m0 = -0.5;
  double diagonal() const { return 4.0 + m0; }
};

/// Per-site flop and byte ledger of one operator application with b rhs:
/// 2574*b flops and (168*b + 114) complex doubles moved.
struct TrafficCount {
  std::uint64_t flops_per_site = 0;
  std::uint64_t bytes_per_site = 0;
};
TrafficCount account_traffic(int b);

/// Timing record of one operator application.
struct PerfReport {
  double seconds = 0.0;
  std::size_t sites = 0;
  int b = 1;
  Layout layout = Layout::column_major;
  double flops = 0.0;
  double bytes = 0.0;
  double gflops = 0.0;
};

/// Half-spinor staging buffers lambda_mu and chi_mu (s = 6), one per direction.
struct HoppingWorkspace {
  std::array<BlockSpinorField, kDims> lambda;
  std::array<BlockSpinorField, kDims> chi;

  void ensure(std::size_t sites, const LayoutPolicy& policy);
};

/// Clover-improved Wilson-Dirac operator
///
///   D psi(x) = (4 + m0) psi(x) - C(x) psi(x)
///              - sum_mu [ (pi^-_mu (x) U_mu(x)) psi(x + mu)
///                       + (pi^+_mu (x) U_mu(x - mu)^dagger) psi(x - mu) ]
///
/// evaluated stage by stage: self coupling, then per direction the projected
/// half spinors lambda_mu / chi_mu, then the two accumulation passes. Site
/// loops run in parallel over disjoint destination sites, so results do not
/// depend on the thread count.
///
/// The operator keeps a scratch workspace; a single instance must not be
/// applied from two threads at once.
class WilsonDirac {
 public:
  WilsonDirac(LatticeGeometry geom, GaugeField gauge, CloverField clover, DiracParams params);

  const LatticeGeometry& geometry() const noexcept { return geom_; }
  const GaugeField& gauge() const noexcept { return gauge_; }
  const CloverField& clover() const noexcept { return clover_; }
  const DiracParams& params() const noexcept { return params_; }
  const ProjectorTable& projectors() const noexcept { return proj_; }
  const std::vector<std::uint32_t>& sites_of(Parity p) const {
    return p == Parity::even ? even_sites_ : odd_sites_;
  }

  /// eta = D psi for every rhs column.
  PerfReport apply(const BlockSpinorField& psi, BlockSpinorField& eta) const;
  BlockSpinorField apply(const BlockSpinorField& psi) const;

  void apply_self_coupling(const BlockSpinorField& psi, BlockSpinorField& eta) const;
  void project_minus(const BlockSpinorField& psi, int mu, BlockSpinorField& lambda) const;
  /// chi(x + mu) = compressed pi^+ U_mu(x)^dagger psi(x)
  void project_plus_apply_udag(const BlockSpinorField& psi, int mu, BlockSpinorField& chi) const;
  /// eta(x) -= reconstruct(U_mu(x) lambda(x + mu))
  void accumulate_hop_minus(const BlockSpinorField& lambda, int mu, BlockSpinorField& eta) const;
  /// eta(x) -= reconstruct(chi(x))
  void accumulate_hop_plus(const BlockSpinorField& chi, int mu, BlockSpinorField& eta) const;

  /// out(x) = (D_{target,other} in)(x) on sites of the target parity: the
  /// hopping block including its minus sign. Sites of the other parity in
  /// `out` are left untouched; only other-parity sites of `in` are read.
  void apply_hopping(const BlockSpinorField& in, BlockSpinorField& out, Parity target) const;
  /// out(x) = (4 + m0) in(x) - C(x) in(x) on sites of the target parity.
  void apply_site_diagonal(const BlockSpinorField& in, BlockSpinorField& out,
                           Parity target) const;

  /// Instrumented flop count of one full application on psi.
  std::uint64_t count_flops(const BlockSpinorField& psi) const;

 private:
  void check_spinor(const BlockSpinorField& f, int s, const char* what) const;

  LatticeGeometry geom_;
  GaugeField gauge_;
  CloverField clover_;
  DiracParams params_;
  const ProjectorTable& proj_;
  std::vector<std::uint32_t> even_sites_;
  std::vector<std::uint32_t> odd_sites_;
  mutable HoppingWorkspace work_;
};

}  // namespace lqml
