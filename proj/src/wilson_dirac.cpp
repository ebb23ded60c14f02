#include "lqml/wilson_dirac.hpp"

#include <algorithm>
#include <chrono>
#include <type_traits>
#include <string>

#include "dirac_kernels.hpp"
#include "lqml/errors.hpp"

namespace lqml {

using detail::FlopTally;
using detail::NoTally;
using detail::with_layout;

TrafficCount account_traffic(int b) {
  if (b < 1) throw ValidationError("account_traffic: b must be >= 1");
  const auto ub = static_cast<std::uint64_t>(b);
  return {2574u * ub, (168u * ub + 114u) * 16u};
}

void HoppingWorkspace::ensure(std::size_t sites, const LayoutPolicy& policy) {
  for (int mu = 0; mu < kDims; ++mu) {
    if (lambda[mu].sites() != sites || !(lambda[mu].policy() == policy)) {
      lambda[mu] = BlockSpinorField(sites, kHalfSpinorComponents, policy);
      chi[mu] = BlockSpinorField(sites, kHalfSpinorComponents, policy);
    }
  }
}

namespace {

long long as_loop(std::size_t n) { return static_cast<long long>(n); }

}  // namespace

WilsonDirac::WilsonDirac(LatticeGeometry geom, GaugeField gauge, CloverField clover,
                         DiracParams params)
    : geom_(std::move(geom)),
      gauge_(std::move(gauge)),
      clover_(std::move(clover)),
      params_(params),
      proj_(ProjectorTable::chiral()) {
  if (gauge_.sites() != geom_.n_sites()) {
    throw ValidationError("WilsonDirac: gauge field has " + std::to_string(gauge_.sites()) +
                          " sites, lattice has " + std::to_string(geom_.n_sites()));
  }
  if (clover_.sites() != geom_.n_sites()) {
    throw ValidationError("WilsonDirac: clover field has " + std::to_string(clover_.sites()) +
                          " sites, lattice has " + std::to_string(geom_.n_sites()));
  }
  for (std::size_t x = 0; x < geom_.n_sites(); ++x) {
    (geom_.site_parity(x) == Parity::even ? even_sites_ : odd_sites_)
        .push_back(static_cast<std::uint32_t>(x));
  }
}

void WilsonDirac::check_spinor(const BlockSpinorField& f, int s, const char* what) const {
  if (f.sites() != geom_.n_sites() || f.components() != s) {
    throw ValidationError(std::string("WilsonDirac: ") + what + " has shape (" +
                          std::to_string(f.sites()) + " sites, s=" +
                          std::to_string(f.components()) + "), expected (" +
                          std::to_string(geom_.n_sites()) + " sites, s=" + std::to_string(s) +
                          ")");
  }
}

void WilsonDirac::apply_self_coupling(const BlockSpinorField& psi, BlockSpinorField& eta) const {
  check_spinor(psi, kSpinorComponents, "psi");
  check_spinor(eta, kSpinorComponents, "eta");
  if (!psi.same_shape(eta)) throw ValidationError("apply_self_coupling: psi/eta layout mismatch");
  const int b = psi.block();
  const double diag = params_.diagonal();
  with_layout(psi.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel for schedule(static)
    for (long long x = 0; x < as_loop(geom_.n_sites()); ++x) {
      NoTally t;
      detail::self_coupling_site<L>(diag, clover_, x, psi.site_ptr(x), eta.site_ptr(x), b, t);
    }
  });
}

void WilsonDirac::project_minus(const BlockSpinorField& psi, int mu,
                                BlockSpinorField& lambda) const {
  const HalfSpinorMap& map = proj_.map(mu, ProjSign::minus);
  const int b = psi.block();
  with_layout(psi.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel for schedule(static)
    for (long long x = 0; x < as_loop(geom_.n_sites()); ++x) {
      NoTally t;
      detail::compress_site<L>(map, psi.site_ptr(x), lambda.site_ptr(x), b, t);
    }
  });
}

void WilsonDirac::project_plus_apply_udag(const BlockSpinorField& psi, int mu,
                                          BlockSpinorField& chi) const {
  const HalfSpinorMap& map = proj_.map(mu, ProjSign::plus);
  const int b = psi.block();
  with_layout(psi.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel
    {
      std::vector<Complex> scratch(static_cast<std::size_t>(kHalfSpinorComponents) * b);
      NoTally t;
      // Loop over destinations y = x + mu so every thread writes its own sites.
#pragma omp for schedule(static)
      for (long long y = 0; y < as_loop(geom_.n_sites()); ++y) {
        const std::size_t x = geom_.neighbor_index(y, mu, Dir::minus);
        detail::project_plus_udag_site<L>(map, gauge_.link(x, mu), psi.site_ptr(x),
                                          scratch.data(), chi.site_ptr(y), b, t);
      }
    }
  });
}

void WilsonDirac::accumulate_hop_minus(const BlockSpinorField& lambda, int mu,
                                       BlockSpinorField& eta) const {
  const HalfSpinorMap& map = proj_.map(mu, ProjSign::minus);
  const int b = eta.block();
  with_layout(eta.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel
    {
      std::vector<Complex> scratch(static_cast<std::size_t>(kHalfSpinorComponents) * b);
      NoTally t;
#pragma omp for schedule(static)
      for (long long x = 0; x < as_loop(geom_.n_sites()); ++x) {
        const std::size_t nb = geom_.neighbor_index(x, mu, Dir::plus);
        detail::hop_minus_site<L>(map, gauge_.link(x, mu), lambda.site_ptr(nb), scratch.data(),
                                  eta.site_ptr(x), b, t);
      }
    }
  });
}

void WilsonDirac::accumulate_hop_plus(const BlockSpinorField& chi, int mu,
                                      BlockSpinorField& eta) const {
  const HalfSpinorMap& map = proj_.map(mu, ProjSign::plus);
  const int b = eta.block();
  with_layout(eta.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel for schedule(static)
    for (long long x = 0; x < as_loop(geom_.n_sites()); ++x) {
      NoTally t;
      detail::expand_subtract_site<L>(map, chi.site_ptr(x), eta.site_ptr(x), b, t);
    }
  });
}

PerfReport WilsonDirac::apply(const BlockSpinorField& psi, BlockSpinorField& eta) const {
  check_spinor(psi, kSpinorComponents, "psi");
  if (!psi.same_shape(eta)) {
    eta = BlockSpinorField(psi.sites(), kSpinorComponents, psi.policy());
  }
  const auto t0 = std::chrono::steady_clock::now();
  work_.ensure(geom_.n_sites(), psi.policy());
  apply_self_coupling(psi, eta);
  for (int mu = 0; mu < kDims; ++mu) project_minus(psi, mu, work_.lambda[mu]);
  for (int mu = 0; mu < kDims; ++mu) project_plus_apply_udag(psi, mu, work_.chi[mu]);
  for (int mu = 0; mu < kDims; ++mu) accumulate_hop_minus(work_.lambda[mu], mu, eta);
  for (int mu = 0; mu < kDims; ++mu) accumulate_hop_plus(work_.chi[mu], mu, eta);
  const auto t1 = std::chrono::steady_clock::now();

  PerfReport rep;
  rep.seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.sites = geom_.n_sites();
  rep.b = psi.block();
  rep.layout = psi.layout();
  const TrafficCount tc = account_traffic(rep.b);
  rep.flops = static_cast<double>(tc.flops_per_site) * static_cast<double>(rep.sites);
  rep.bytes = static_cast<double>(tc.bytes_per_site) * static_cast<double>(rep.sites);
  rep.gflops = rep.seconds > 0.0 ? rep.flops / rep.seconds * 1e-9 : 0.0;
  return rep;
}

BlockSpinorField WilsonDirac::apply(const BlockSpinorField& psi) const {
  BlockSpinorField eta(psi.sites(), kSpinorComponents, psi.policy());
  apply(psi, eta);
  return eta;
}

void WilsonDirac::apply_hopping(const BlockSpinorField& in, BlockSpinorField& out,
                                Parity target) const {
  check_spinor(in, kSpinorComponents, "hopping input");
  check_spinor(out, kSpinorComponents, "hopping output");
  if (!in.same_shape(out)) throw ValidationError("apply_hopping: in/out layout mismatch");
  const int b = in.block();
  const std::vector<std::uint32_t>& sites = sites_of(target);
  with_layout(in.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel
    {
      const std::size_t hn = static_cast<std::size_t>(kHalfSpinorComponents) * b;
      std::vector<Complex> h(hn), g(hn);
      NoTally t;
#pragma omp for schedule(static)
      for (long long n = 0; n < as_loop(sites.size()); ++n) {
        const std::size_t y = sites[n];
        Complex* o = out.site_ptr(y);
        std::fill(o, o + out.site_stride(), Complex{});
        for (int mu = 0; mu < kDims; ++mu) {
          const HalfSpinorMap& m = proj_.map(mu, ProjSign::minus);
          const std::size_t fwd = geom_.neighbor_index(y, mu, Dir::plus);
          detail::compress_site<L>(m, in.site_ptr(fwd), h.data(), b, t);
          detail::hop_minus_site<L>(m, gauge_.link(y, mu), h.data(), g.data(), o, b, t);
        }
        for (int mu = 0; mu < kDims; ++mu) {
          const HalfSpinorMap& m = proj_.map(mu, ProjSign::plus);
          const std::size_t bwd = geom_.neighbor_index(y, mu, Dir::minus);
          detail::project_plus_udag_site<L>(m, gauge_.link(bwd, mu), in.site_ptr(bwd), h.data(),
                                            g.data(), b, t);
          detail::expand_subtract_site<L>(m, g.data(), o, b, t);
        }
      }
    }
  });
}

void WilsonDirac::apply_site_diagonal(const BlockSpinorField& in, BlockSpinorField& out,
                                      Parity target) const {
  check_spinor(in, kSpinorComponents, "diagonal input");
  check_spinor(out, kSpinorComponents, "diagonal output");
  if (!in.same_shape(out)) throw ValidationError("apply_site_diagonal: in/out layout mismatch");
  const int b = in.block();
  const double diag = params_.diagonal();
  const std::vector<std::uint32_t>& sites = sites_of(target);
  with_layout(in.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
#pragma omp parallel for schedule(static)
    for (long long n = 0; n < as_loop(sites.size()); ++n) {
      NoTally t;
      const std::size_t x = sites[n];
      detail::self_coupling_site<L>(diag, clover_, x, in.site_ptr(x), out.site_ptr(x), b, t);
    }
  });
}

std::uint64_t WilsonDirac::count_flops(const BlockSpinorField& psi) const {
  check_spinor(psi, kSpinorComponents, "psi");
  const int b = psi.block();
  const double diag = params_.diagonal();
  BlockSpinorField eta(psi.sites(), kSpinorComponents, psi.policy());
  HoppingWorkspace w;
  w.ensure(geom_.n_sites(), psi.policy());
  std::vector<Complex> scratch(static_cast<std::size_t>(kHalfSpinorComponents) * b);
  FlopTally t;
  with_layout(psi.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
    const std::size_t n = geom_.n_sites();
    for (std::size_t x = 0; x < n; ++x)
      detail::self_coupling_site<L>(diag, clover_, x, psi.site_ptr(x), eta.site_ptr(x), b, t);
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::minus);
      for (std::size_t x = 0; x < n; ++x)
        detail::compress_site<L>(m, psi.site_ptr(x), w.lambda[mu].site_ptr(x), b, t);
    }
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::plus);
      for (std::size_t y = 0; y < n; ++y) {
        const std::size_t x = geom_.neighbor_index(y, mu, Dir::minus);
        detail::project_plus_udag_site<L>(m, gauge_.link(x, mu), psi.site_ptr(x), scratch.data(),
                                          w.chi[mu].site_ptr(y), b, t);
      }
    }
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::minus);
      for (std::size_t x = 0; x < n; ++x) {
        const std::size_t nb = geom_.neighbor_index(x, mu, Dir::plus);
        detail::hop_minus_site<L>(m, gauge_.link(x, mu), w.lambda[mu].site_ptr(nb),
                                  scratch.data(), eta.site_ptr(x), b, t);
      }
    }
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::plus);
      for (std::size_t x = 0; x < n; ++x)
        detail::expand_subtract_site<L>(m, w.chi[mu].site_ptr(x), eta.site_ptr(x), b, t);
    }
  });
  return t.flops;
}

}  // namespace lqml
