#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lqml {

/// Per-dimension extents (N0, N1, N2, N3) or rank-grid shape (R0..R3).
using Extents = std::array<int, 4>;
/// Site coordinate (x0, x1, x2, x3), 0 <= x_d < N_d.
using SiteCoord = std::array<int, 4>;

enum class Parity : std::uint8_t { even = 0, odd = 1 };
/// Hop direction along a dimension: +mu-hat or -mu-hat.
enum class Dir : std::uint8_t { plus = 0, minus = 1 };

constexpr int kDims = 4;

inline constexpr Dir opposite(Dir d) { return d == Dir::plus ? Dir::minus : Dir::plus; }
inline constexpr int dir_index(Dir d) { return static_cast<int>(d); }

Parity parity(const SiteCoord& c);
std::string to_string(const Extents& e);

/// 4D periodic lattice with mixed-radix site numbering
/// x = ((x0*N1 + x1)*N2 + x2)*N3 + x3.
///
/// Neighbor and parity tables are built once at construction; the object is
/// immutable afterwards and safe to share between threads.
class LatticeGeometry {
 public:
  explicit LatticeGeometry(Extents dims);

  const Extents& dims() const noexcept { return dims_; }
  int extent(int mu) const { return dims_[mu]; }
  std::size_t n_sites() const noexcept { return n_sites_; }

  std::size_t site_index(const SiteCoord& c) const;
  SiteCoord site_coord(std::size_t x) const;
  SiteCoord neighbor(const SiteCoord& c, int mu, Dir dir) const;

  /// Table lookup of the periodic neighbor site number.
  std::size_t neighbor_index(std::size_t x, int mu, Dir dir) const {
    return dir == Dir::plus ? fwd_[x * kDims + mu] : bwd_[x * kDims + mu];
  }
  Parity site_parity(std::size_t x) const { return static_cast<Parity>(parity_[x]); }
  bool contains(const SiteCoord& c) const;

  friend bool operator==(const LatticeGeometry& a, const LatticeGeometry& b) {
    return a.dims_ == b.dims_;
  }

 private:
  Extents dims_;
  std::size_t n_sites_;
  std::vector<std::uint32_t> fwd_;
  std::vector<std::uint32_t> bwd_;
  std::vector<std::uint8_t> parity_;
};

/// One simulated rank's share of a decomposed lattice.
struct RankDomain {
  int rank = 0;
  SiteCoord grid_coord{};
  SiteCoord origin{};  // global coordinate of local site (0,0,0,0)
  Extents local_dims{};
  /// global_sites[local] = global site number, local sites in local mixed-radix order.
  std::vector<std::size_t> global_sites;
  /// boundary[mu][dir]: local sites (ascending) whose dir-neighbor along mu is
  /// owned by another rank. Empty when the grid is not split along mu.
  std::array<std::array<std::vector<std::size_t>, 2>, kDims> boundary;

  const std::vector<std::size_t>& boundary_sites(int mu, Dir d) const {
    return boundary[mu][dir_index(d)];
  }
};

/// Block decomposition of a lattice over a rank grid (R0..R3), ranks numbered
/// with the same mixed-radix rule as sites.
class Decomposition {
 public:
  Decomposition(const LatticeGeometry& global, Extents grid);

  const Extents& grid() const noexcept { return grid_; }
  const Extents& local_dims() const noexcept { return local_dims_; }
  int n_ranks() const noexcept { return static_cast<int>(ranks_.size()); }
  const RankDomain& rank(int r) const { return ranks_.at(r); }
  const std::vector<RankDomain>& ranks() const noexcept { return ranks_; }
  const LatticeGeometry& local_geometry() const noexcept { return local_geom_; }

  int neighbor_rank(int r, int mu, Dir dir) const;
  int owner(std::size_t global_site) const { return owner_[global_site]; }
  std::size_t local_index(std::size_t global_site) const { return local_[global_site]; }
  bool is_split(int mu) const { return grid_[mu] > 1; }

 private:
  Extents grid_;
  Extents local_dims_;
  LatticeGeometry local_geom_;
  std::vector<RankDomain> ranks_;
  std::vector<int> owner_;
  std::vector<std::size_t> local_;
};

}  // namespace lqml
