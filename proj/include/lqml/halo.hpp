#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "lqml/field.hpp"
#include "lqml/gauge.hpp"
#include "lqml/geometry.hpp"
#include "lqml/wilson_dirac.hpp"

namespace lqml {

/// Packed half spinors of one boundary face: 6*b complex per boundary site,
/// boundary sites in ascending local order, each site block in field layout.
struct HaloMessage {
  int src_rank = 0;
  int dst_rank = 0;
  int mu = 0;
  Dir dir = Dir::plus;
  std::vector<Complex> payload;
};

struct SendHandle {
  std::uint64_t epoch = 0;
  int dst_rank = 0;
  int mu = 0;
  Dir dir = Dir::plus;
};

/// Per rank, per epoch timing split.
struct EpochStats {
  std::uint64_t epoch = 0;
  int rank = 0;
  double wait_seconds = 0.0;
  double compute_seconds = 0.0;
};

/// Posts and receives counted during one epoch.
struct EpochAudit {
  std::uint64_t epoch = 0;
  std::size_t posted = 0;
  std::size_t received = 0;
  std::size_t unconsumed = 0;
};

/// In-process message fabric for a rank grid. Channel (dst, mu, dir) holds at
/// most one message per epoch; `dir` is the direction the message travelled,
/// so a send along -mu from rank r is received as (mu, minus) by the -mu
/// neighbor of r.
///
/// Any number of ranks may post and receive concurrently. Epoch transitions
/// (begin_epoch / end_epoch) must not overlap with traffic.
class HaloNetwork {
 public:
  explicit HaloNetwork(const Decomposition& decomp,
                       std::chrono::milliseconds timeout = std::chrono::seconds(5));

  const Decomposition& decomposition() const noexcept { return decomp_; }
  int n_ranks() const noexcept { return decomp_.n_ranks(); }
  std::chrono::milliseconds timeout() const noexcept { return timeout_; }
  void set_timeout(std::chrono::milliseconds t) { timeout_ = t; }

  /// Starts a new epoch: clears mailboxes, counters and per-rank stats.
  void begin_epoch();
  /// Closes the epoch and returns its audit; messages left unread are counted.
  EpochAudit end_epoch();
  std::uint64_t epoch() const noexcept { return epoch_; }

  SendHandle post_send(int src_rank, int mu, Dir dir, std::vector<Complex> payload);
  std::vector<Complex> complete_recv(int rank, int mu, Dir dir);

  /// Seconds rank has spent blocked inside complete_recv this epoch.
  double wait_seconds(int rank) const;
  void add_compute_seconds(int rank, double s);
  EpochStats stats(int rank) const;
  std::vector<EpochStats> all_stats() const;

 private:
  using Key = std::tuple<int, int, int>;  // dst, mu, dir
  static Key key(int dst, int mu, Dir dir) { return {dst, mu, dir_index(dir)}; }

  const Decomposition& decomp_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::map<Key, HaloMessage> boxes_;
  std::set<Key> posted_keys_;
  std::vector<EpochStats> stats_;
  std::uint64_t epoch_ = 0;
  std::size_t posted_ = 0;
  std::size_t received_ = 0;
};

/// One rank's endpoint of a HaloNetwork.
class Communicator {
 public:
  Communicator(HaloNetwork& net, int rank) : net_(&net), rank_(rank) {}

  int rank() const noexcept { return rank_; }
  const Extents& grid() const { return net_->decomposition().grid(); }

  /// Non-blocking: the message is delivered to the dir-neighbor along mu.
  SendHandle post_send(int mu, Dir dir, std::vector<Complex> payload) {
    return net_->post_send(rank_, mu, dir, std::move(payload));
  }
  /// Blocks until the message travelling along (mu, dir) into this rank exists.
  std::vector<Complex> complete_recv(int mu, Dir dir) {
    return net_->complete_recv(rank_, mu, dir);
  }
  EpochStats exchange_epoch_stats() const { return net_->stats(rank_); }

 private:
  HaloNetwork* net_;
  int rank_;
};

enum class ExecutionMode : std::uint8_t {
  /// Every rank runs its send phase in rank order, then every rank its
  /// receive phase. Deterministic and single threaded.
  sequential,
  /// One worker thread per rank; receives block on the neighbors' posts.
  concurrent,
};

/// The Wilson-Dirac operator on a rank grid. Each rank owns a block of the
/// lattice and, per application,
///
///   a. computes the self coupling and lambda_mu = P^- psi on local sites,
///      then sends lambda on its -mu face to the -mu neighbor;
///   b. computes chi_mu = P^+ U^dagger psi and sends its +mu face to the
///      +mu neighbor;
///   c. receives lambda from +mu and chi from -mu;
///   d. accumulates the backward hops, then the forward hops.
///
/// Halos are exchanged only along split dimensions; unsplit dimensions wrap
/// locally. The per-site kernels and accumulation order are those of
/// WilsonDirac, so gathered results match the single-rank operator bit for bit.
class DistributedDirac {
 public:
  DistributedDirac(const LatticeGeometry& global, const GaugeField& gauge,
                   const CloverField& clover, DiracParams params, Extents grid,
                   std::chrono::milliseconds timeout = std::chrono::seconds(5));
  DistributedDirac(const DistributedDirac&) = delete;
  DistributedDirac& operator=(const DistributedDirac&) = delete;

  const Decomposition& decomposition() const noexcept { return decomp_; }
  HaloNetwork& network() noexcept { return net_; }
  int n_ranks() const noexcept { return decomp_.n_ranks(); }

  std::vector<BlockSpinorField> scatter(const BlockSpinorField& global) const;
  BlockSpinorField gather(const std::vector<BlockSpinorField>& local) const;

  /// One exchange epoch over all ranks.
  void apply(const std::vector<BlockSpinorField>& psi, std::vector<BlockSpinorField>& eta,
             ExecutionMode mode = ExecutionMode::sequential);
  BlockSpinorField apply(const BlockSpinorField& global_psi,
                         ExecutionMode mode = ExecutionMode::sequential);

  /// Steps a-b for one rank (computes and posts all sends).
  void post_phase(int rank, const BlockSpinorField& psi, BlockSpinorField& eta);
  /// Step c: blocking receives of both halos along split dimensions.
  void receive_halos(int rank);
  /// Step d. Raises ContractViolation if a needed halo was not received.
  void accumulate_phase(int rank, BlockSpinorField& eta);

  /// Stats of the most recent epoch, one record per rank.
  std::vector<EpochStats> last_stats() const { return last_stats_; }
  const EpochAudit& last_audit() const noexcept { return last_audit_; }

 private:
  struct RankState {
    GaugeField gauge;
    CloverField clover;
    HoppingWorkspace work;
    // slot[mu][dir][x]: position of local site x in the (mu, dir) face, or -1.
    std::array<std::array<std::vector<std::int32_t>, 2>, kDims> slot;
    std::array<std::vector<Complex>, kDims> lambda_halo;  // from +mu neighbor
    std::array<bool, kDims> lambda_ready{};
    std::array<bool, kDims> chi_ready{};
    bool posted = false;  // post_phase ran this epoch
    LayoutPolicy policy{};
  };

  void run_rank(int rank, const BlockSpinorField& psi, BlockSpinorField& eta);

  const LatticeGeometry& local_geom() const { return decomp_.local_geometry(); }

  Decomposition decomp_;
  DiracParams params_;
  const ProjectorTable& proj_;
  HaloNetwork net_;
  std::vector<RankState> ranks_;
  std::vector<EpochStats> last_stats_;
  EpochAudit last_audit_;
};

}  // namespace lqml
