#include "lqml/halo.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <type_traits>

#include "dirac_kernels.hpp"
#include "lqml/errors.hpp"

namespace lqml {

using detail::with_layout;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char* dir_name(Dir d) { return d == Dir::plus ? "+" : "-"; }

std::string channel_name(int rank, int mu, Dir dir) {
  return "(rank " + std::to_string(rank) + ", mu " + std::to_string(mu) + ", dir " +
         dir_name(dir) + ")";
}

}  // namespace

// ---------------------------------------------------------------- network

HaloNetwork::HaloNetwork(const Decomposition& decomp, std::chrono::milliseconds timeout)
    : decomp_(decomp), timeout_(timeout), stats_(decomp.n_ranks()) {
  for (int r = 0; r < n_ranks(); ++r) stats_[r].rank = r;
}

void HaloNetwork::begin_epoch() {
  std::lock_guard lock(mutex_);
  ++epoch_;
  boxes_.clear();
  posted_keys_.clear();
  posted_ = 0;
  received_ = 0;
  for (int r = 0; r < n_ranks(); ++r) stats_[r] = {epoch_, r, 0.0, 0.0};
}

EpochAudit HaloNetwork::end_epoch() {
  std::lock_guard lock(mutex_);
  return {epoch_, posted_, received_, boxes_.size()};
}

SendHandle HaloNetwork::post_send(int src_rank, int mu, Dir dir, std::vector<Complex> payload) {
  const int dst = decomp_.neighbor_rank(src_rank, mu, dir);
  const Key k = key(dst, mu, dir);
  {
    std::lock_guard lock(mutex_);
    if (!posted_keys_.insert(k).second) {
      throw CommError("duplicate post on channel " + channel_name(dst, mu, dir) + " from rank " +
                      std::to_string(src_rank) + " in epoch " + std::to_string(epoch_));
    }
    boxes_.emplace(k, HaloMessage{src_rank, dst, mu, dir, std::move(payload)});
    ++posted_;
  }
  cv_.notify_all();
  return {epoch_, dst, mu, dir};
}

std::vector<Complex> HaloNetwork::complete_recv(int rank, int mu, Dir dir) {
  const Key k = key(rank, mu, dir);
  const auto t0 = Clock::now();
  std::unique_lock lock(mutex_);
  const bool arrived = cv_.wait_for(lock, timeout_, [&] { return boxes_.count(k) != 0; });
  stats_.at(rank).wait_seconds += seconds_since(t0);
  if (!arrived) {
    const int src = decomp_.neighbor_rank(rank, mu, opposite(dir));
    throw CommError("timed out after " + std::to_string(timeout_.count()) +
                    " ms waiting for message " + channel_name(rank, mu, dir) + " from rank " +
                    std::to_string(src));
  }
  auto node = boxes_.extract(k);
  ++received_;
  return std::move(node.mapped().payload);
}

double HaloNetwork::wait_seconds(int rank) const {
  std::lock_guard lock(mutex_);
  return stats_.at(rank).wait_seconds;
}

void HaloNetwork::add_compute_seconds(int rank, double s) {
  std::lock_guard lock(mutex_);
  stats_.at(rank).compute_seconds += s;
}

EpochStats HaloNetwork::stats(int rank) const {
  std::lock_guard lock(mutex_);
  return stats_.at(rank);
}

std::vector<EpochStats> HaloNetwork::all_stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

// ------------------------------------------------------ distributed operator

DistributedDirac::DistributedDirac(const LatticeGeometry& global, const GaugeField& gauge,
                                   const CloverField& clover, DiracParams params, Extents grid,
                                   std::chrono::milliseconds timeout)
    : decomp_(global, grid),
      params_(params),
      proj_(ProjectorTable::chiral()),
      net_(decomp_, timeout),
      ranks_(decomp_.n_ranks()) {
  if (gauge.sites() != global.n_sites() || clover.sites() != global.n_sites()) {
    throw ValidationError("DistributedDirac: field sizes do not match the lattice");
  }
  const std::size_t n_local = local_geom().n_sites();
  for (int r = 0; r < n_ranks(); ++r) {
    const RankDomain& dom = decomp_.rank(r);
    RankState& st = ranks_[r];
    st.gauge = GaugeField(n_local);
    st.clover = CloverField(n_local);
    for (std::size_t x = 0; x < n_local; ++x) {
      const std::size_t g = dom.global_sites[x];
      for (int mu = 0; mu < kDims; ++mu) {
        std::copy_n(gauge.link(g, mu), 9, st.gauge.link(x, mu));
      }
      std::copy_n(clover.site(g), kCloverPerSite, st.clover.site(x));
    }
    for (int mu = 0; mu < kDims; ++mu) {
      for (Dir d : {Dir::plus, Dir::minus}) {
        auto& slot = st.slot[mu][dir_index(d)];
        slot.assign(n_local, -1);
        const auto& face = dom.boundary_sites(mu, d);
        for (std::size_t i = 0; i < face.size(); ++i) slot[face[i]] = static_cast<std::int32_t>(i);
      }
    }
  }
}

std::vector<BlockSpinorField> DistributedDirac::scatter(const BlockSpinorField& global) const {
  if (global.sites() != decomp_.ranks().size() * local_geom().n_sites()) {
    throw ValidationError("scatter: field does not cover the global lattice");
  }
  std::vector<BlockSpinorField> out;
  out.reserve(n_ranks());
  const std::size_t stride = global.site_stride();
  for (const RankDomain& dom : decomp_.ranks()) {
    BlockSpinorField f(dom.global_sites.size(), global.components(), global.policy());
    for (std::size_t x = 0; x < dom.global_sites.size(); ++x) {
      std::copy_n(global.site_ptr(dom.global_sites[x]), stride, f.site_ptr(x));
    }
    out.push_back(std::move(f));
  }
  return out;
}

BlockSpinorField DistributedDirac::gather(const std::vector<BlockSpinorField>& local) const {
  if (static_cast<int>(local.size()) != n_ranks()) {
    throw ValidationError("gather: expected one field per rank");
  }
  const BlockSpinorField& first = local.front();
  BlockSpinorField out(first.sites() * local.size(), first.components(), first.policy());
  const std::size_t stride = first.site_stride();
  for (int r = 0; r < n_ranks(); ++r) {
    const RankDomain& dom = decomp_.rank(r);
    if (!local[r].same_shape(first)) throw ValidationError("gather: rank fields differ in shape");
    for (std::size_t x = 0; x < dom.global_sites.size(); ++x) {
      std::copy_n(local[r].site_ptr(x), stride, out.site_ptr(dom.global_sites[x]));
    }
  }
  return out;
}

void DistributedDirac::post_phase(int rank, const BlockSpinorField& psi, BlockSpinorField& eta) {
  const auto t0 = Clock::now();
  const LatticeGeometry& lg = local_geom();
  const std::size_t n = lg.n_sites();
  if (psi.sites() != n || psi.components() != kSpinorComponents) {
    throw ValidationError("post_phase: psi does not match the local lattice of rank " +
                          std::to_string(rank));
  }
  if (!eta.same_shape(psi)) eta = BlockSpinorField(n, kSpinorComponents, psi.policy());

  RankState& st = ranks_.at(rank);
  const RankDomain& dom = decomp_.rank(rank);
  st.policy = psi.policy();
  st.work.ensure(n, st.policy);
  st.lambda_ready.fill(false);
  st.chi_ready.fill(false);

  const int b = psi.block();
  const std::size_t hs = static_cast<std::size_t>(kHalfSpinorComponents) * b;
  const double diag = params_.diagonal();
  Communicator comm(net_, rank);

  with_layout(psi.layout(), [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
    detail::NoTally t;
    // self coupling
    for (std::size_t x = 0; x < n; ++x) {
      detail::self_coupling_site<L>(diag, st.clover, x, psi.site_ptr(x), eta.site_ptr(x), b, t);
    }
    // lambda on every site; the -mu face goes out
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::minus);
      BlockSpinorField& lam = st.work.lambda[mu];
      for (std::size_t x = 0; x < n; ++x) {
        detail::compress_site<L>(m, psi.site_ptr(x), lam.site_ptr(x), b, t);
      }
      if (decomp_.is_split(mu)) {
        const auto& face = dom.boundary_sites(mu, Dir::minus);
        std::vector<Complex> buf(face.size() * hs);
        for (std::size_t i = 0; i < face.size(); ++i) {
          std::copy_n(lam.site_ptr(face[i]), hs, buf.data() + i * hs);
        }
        comm.post_send(mu, Dir::minus, std::move(buf));
      }
    }
    // chi(x + mu) for local destinations; the +mu face goes out
    std::vector<Complex> scratch(hs);
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::plus);
      BlockSpinorField& chi = st.work.chi[mu];
      const bool split = decomp_.is_split(mu);
      const auto& incoming = st.slot[mu][dir_index(Dir::minus)];
      for (std::size_t y = 0; y < n; ++y) {
        if (split && incoming[y] >= 0) continue;  // source lives on the -mu neighbor
        const std::size_t x = lg.neighbor_index(y, mu, Dir::minus);
        detail::project_plus_udag_site<L>(m, st.gauge.link(x, mu), psi.site_ptr(x),
                                          scratch.data(), chi.site_ptr(y), b, t);
      }
      if (split) {
        const auto& face = dom.boundary_sites(mu, Dir::plus);
        std::vector<Complex> buf(face.size() * hs);
        for (std::size_t i = 0; i < face.size(); ++i) {
          const std::size_t x = face[i];
          detail::project_plus_udag_site<L>(m, st.gauge.link(x, mu), psi.site_ptr(x),
                                            scratch.data(), buf.data() + i * hs, b, t);
        }
        comm.post_send(mu, Dir::plus, std::move(buf));
      }
    }
  });
  st.posted = true;
  net_.add_compute_seconds(rank, seconds_since(t0));
}

void DistributedDirac::receive_halos(int rank) {
  RankState& st = ranks_.at(rank);
  if (!st.posted) {
    throw ContractViolation("receive_halos: rank " + std::to_string(rank) +
                            " has not run its send phase");
  }
  const RankDomain& dom = decomp_.rank(rank);
  const std::size_t hs = static_cast<std::size_t>(kHalfSpinorComponents) * st.policy.b;
  Communicator comm(net_, rank);
  for (int mu = 0; mu < kDims; ++mu) {
    if (!decomp_.is_split(mu)) continue;
    // lambda from the +mu neighbor covers this rank's +mu face
    std::vector<Complex> lam = comm.complete_recv(mu, Dir::minus);
    const auto t0 = Clock::now();
    if (lam.size() != dom.boundary_sites(mu, Dir::plus).size() * hs) {
      throw CommError("lambda halo " + channel_name(rank, mu, Dir::minus) + " has " +
                      std::to_string(lam.size()) + " values, expected " +
                      std::to_string(dom.boundary_sites(mu, Dir::plus).size() * hs));
    }
    st.lambda_halo[mu] = std::move(lam);
    st.lambda_ready[mu] = true;
    net_.add_compute_seconds(rank, seconds_since(t0));

    // chi from the -mu neighbor lands on this rank's -mu face
    std::vector<Complex> chi = comm.complete_recv(mu, Dir::plus);
    const auto t1 = Clock::now();
    const auto& face = dom.boundary_sites(mu, Dir::minus);
    if (chi.size() != face.size() * hs) {
      throw CommError("chi halo " + channel_name(rank, mu, Dir::plus) + " has " +
                      std::to_string(chi.size()) + " values, expected " +
                      std::to_string(face.size() * hs));
    }
    for (std::size_t i = 0; i < face.size(); ++i) {
      std::copy_n(chi.data() + i * hs, hs, st.work.chi[mu].site_ptr(face[i]));
    }
    st.chi_ready[mu] = true;
    net_.add_compute_seconds(rank, seconds_since(t1));
  }
}

void DistributedDirac::accumulate_phase(int rank, BlockSpinorField& eta) {
  const auto t0 = Clock::now();
  RankState& st = ranks_.at(rank);
  for (int mu = 0; mu < kDims; ++mu) {
    if (!decomp_.is_split(mu)) continue;
    if (!st.lambda_ready[mu] || !st.chi_ready[mu]) {
      throw ContractViolation("accumulate_phase: halo for mu " + std::to_string(mu) +
                              " on rank " + std::to_string(rank) + " was not received");
    }
  }
  const LatticeGeometry& lg = local_geom();
  const std::size_t n = lg.n_sites();
  const int b = st.policy.b;
  const std::size_t hs = static_cast<std::size_t>(kHalfSpinorComponents) * b;

  with_layout(st.policy.layout, [&](auto tag) {
    constexpr Layout L = decltype(tag)::value;
    detail::NoTally t;
    std::vector<Complex> scratch(hs);
    // backward hops U lambda(x + mu)
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::minus);
      const BlockSpinorField& lam = st.work.lambda[mu];
      const bool split = decomp_.is_split(mu);
      const auto& outgoing = st.slot[mu][dir_index(Dir::plus)];
      for (std::size_t x = 0; x < n; ++x) {
        const Complex* nb = (split && outgoing[x] >= 0)
                                ? st.lambda_halo[mu].data() + outgoing[x] * hs
                                : lam.site_ptr(lg.neighbor_index(x, mu, Dir::plus));
        detail::hop_minus_site<L>(m, st.gauge.link(x, mu), nb, scratch.data(), eta.site_ptr(x),
                                  b, t);
      }
    }
    // forward hops chi(x)
    for (int mu = 0; mu < kDims; ++mu) {
      const HalfSpinorMap& m = proj_.map(mu, ProjSign::plus);
      const BlockSpinorField& chi = st.work.chi[mu];
      for (std::size_t x = 0; x < n; ++x) {
        detail::expand_subtract_site<L>(m, chi.site_ptr(x), eta.site_ptr(x), b, t);
      }
    }
  });
  st.posted = false;
  st.lambda_ready.fill(false);
  st.chi_ready.fill(false);
  net_.add_compute_seconds(rank, seconds_since(t0));
}

void DistributedDirac::run_rank(int rank, const BlockSpinorField& psi, BlockSpinorField& eta) {
  post_phase(rank, psi, eta);
  receive_halos(rank);
  accumulate_phase(rank, eta);
}

void DistributedDirac::apply(const std::vector<BlockSpinorField>& psi,
                             std::vector<BlockSpinorField>& eta, ExecutionMode mode) {
  if (static_cast<int>(psi.size()) != n_ranks()) {
    throw ValidationError("DistributedDirac::apply: expected one field per rank");
  }
  eta.resize(psi.size());
  for (RankState& st : ranks_) st.posted = false;
  net_.begin_epoch();
  if (mode == ExecutionMode::sequential) {
    for (int r = 0; r < n_ranks(); ++r) post_phase(r, psi[r], eta[r]);
    for (int r = 0; r < n_ranks(); ++r) {
      receive_halos(r);
      accumulate_phase(r, eta[r]);
    }
  } else {
    std::vector<std::exception_ptr> errors(n_ranks());
    std::vector<std::thread> workers;
    workers.reserve(n_ranks());
    for (int r = 0; r < n_ranks(); ++r) {
      workers.emplace_back([&, r] {
        try {
          run_rank(r, psi[r], eta[r]);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    }
    for (std::thread& w : workers) w.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  last_audit_ = net_.end_epoch();
  last_stats_ = net_.all_stats();
  if (last_audit_.unconsumed != 0 || last_audit_.posted != last_audit_.received) {
    throw CommError("epoch " + std::to_string(last_audit_.epoch) + ": " +
                    std::to_string(last_audit_.unconsumed) + " messages left unconsumed");
  }
}

BlockSpinorField DistributedDirac::apply(const BlockSpinorField& global_psi, ExecutionMode mode) {
  std::vector<BlockSpinorField> local = scatter(global_psi);
  std::vector<BlockSpinorField> out;
  apply(local, out, mode);
  return gather(out);
}

}  // namespace lqml
