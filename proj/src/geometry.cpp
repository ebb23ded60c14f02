#include "lqml/geometry.hpp"

#include <sstream>

#include "lqml/errors.hpp"

namespace lqml {

namespace {

Extents validated(Extents dims) {
  for (int d = 0; d < kDims; ++d) {
    if (dims[d] < 2 || dims[d] % 2 != 0) {
      throw ValidationError("lattice extent N" + std::to_string(d) + " = " +
                            std::to_string(dims[d]) + " must be even and >= 2");
    }
  }
  return dims;
}

std::size_t mixed_radix(const Extents& dims, const SiteCoord& c) {
  return ((static_cast<std::size_t>(c[0]) * dims[1] + c[1]) * dims[2] + c[2]) * dims[3] + c[3];
}

SiteCoord mixed_radix_inverse(const Extents& dims, std::size_t x) {
  SiteCoord c{};
  for (int d = kDims - 1; d >= 0; --d) {
    c[d] = static_cast<int>(x % dims[d]);
    x /= dims[d];
  }
  return c;
}

Extents local_extents(const LatticeGeometry& global, const Extents& grid) {
  Extents local{};
  for (int d = 0; d < kDims; ++d) {
    if (grid[d] < 1) {
      throw ValidationError("rank grid entry R" + std::to_string(d) + " must be positive");
    }
    if (global.extent(d) % grid[d] != 0) {
      throw ValidationError("rank grid " + to_string(grid) + " does not divide lattice " +
                            to_string(global.dims()));
    }
    local[d] = global.extent(d) / grid[d];
    if (local[d] < 2 || local[d] % 2 != 0) {
      throw ValidationError("local extent along dimension " + std::to_string(d) + " is " +
                            std::to_string(local[d]) + "; must be even and >= 2");
    }
  }
  return local;
}

}  // namespace

Parity parity(const SiteCoord& c) {
  return static_cast<Parity>((c[0] + c[1] + c[2] + c[3]) & 1);
}

std::string to_string(const Extents& e) {
  std::ostringstream os;
  os << e[0] << 'x' << e[1] << 'x' << e[2] << 'x' << e[3];
  return os.str();
}

LatticeGeometry::LatticeGeometry(Extents dims)
    : dims_(validated(dims)),
      n_sites_(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * dims[3]) {
  fwd_.resize(n_sites_ * kDims);
  bwd_.resize(n_sites_ * kDims);
  parity_.resize(n_sites_);
  for (std::size_t x = 0; x < n_sites_; ++x) {
    const SiteCoord c = site_coord(x);
    parity_[x] = static_cast<std::uint8_t>(parity(c));
    for (int mu = 0; mu < kDims; ++mu) {
      fwd_[x * kDims + mu] = static_cast<std::uint32_t>(site_index(neighbor(c, mu, Dir::plus)));
      bwd_[x * kDims + mu] = static_cast<std::uint32_t>(site_index(neighbor(c, mu, Dir::minus)));
    }
  }
}

bool LatticeGeometry::contains(const SiteCoord& c) const {
  for (int d = 0; d < kDims; ++d) {
    if (c[d] < 0 || c[d] >= dims_[d]) return false;
  }
  return true;
}

std::size_t LatticeGeometry::site_index(const SiteCoord& c) const {
  if (!contains(c)) {
    throw ValidationError("site coordinate (" + std::to_string(c[0]) + "," +
                          std::to_string(c[1]) + "," + std::to_string(c[2]) + "," +
                          std::to_string(c[3]) + ") outside lattice " + to_string(dims_));
  }
  return mixed_radix(dims_, c);
}

SiteCoord LatticeGeometry::site_coord(std::size_t x) const {
  if (x >= n_sites_) {
    throw ValidationError("site number " + std::to_string(x) + " out of range");
  }
  return mixed_radix_inverse(dims_, x);
}

SiteCoord LatticeGeometry::neighbor(const SiteCoord& c, int mu, Dir dir) const {
  SiteCoord n = c;
  const int step = dir == Dir::plus ? 1 : dims_[mu] - 1;
  n[mu] = (c[mu] + step) % dims_[mu];
  return n;
}

Decomposition::Decomposition(const LatticeGeometry& global, Extents grid)
    : grid_(grid),
      local_dims_(local_extents(global, grid)),
      local_geom_(local_dims_),
      owner_(global.n_sites()),
      local_(global.n_sites()) {
  const int n_ranks = grid_[0] * grid_[1] * grid_[2] * grid_[3];
  ranks_.resize(n_ranks);
  const std::size_t local_sites = local_geom_.n_sites();

  for (int r = 0; r < n_ranks; ++r) {
    RankDomain& dom = ranks_[r];
    dom.rank = r;
    dom.grid_coord = mixed_radix_inverse(grid_, static_cast<std::size_t>(r));
    dom.local_dims = local_dims_;
    for (int d = 0; d < kDims; ++d) dom.origin[d] = dom.grid_coord[d] * local_dims_[d];
    dom.global_sites.resize(local_sites);

    for (std::size_t l = 0; l < local_sites; ++l) {
      const SiteCoord lc = local_geom_.site_coord(l);
      SiteCoord gc{};
      for (int d = 0; d < kDims; ++d) gc[d] = dom.origin[d] + lc[d];
      const std::size_t g = global.site_index(gc);
      dom.global_sites[l] = g;
      owner_[g] = r;
      local_[g] = l;
      for (int mu = 0; mu < kDims; ++mu) {
        if (grid_[mu] == 1) continue;
        if (lc[mu] == 0) dom.boundary[mu][dir_index(Dir::minus)].push_back(l);
        if (lc[mu] == local_dims_[mu] - 1) dom.boundary[mu][dir_index(Dir::plus)].push_back(l);
      }
    }
  }
}

int Decomposition::neighbor_rank(int r, int mu, Dir dir) const {
  SiteCoord g = ranks_.at(r).grid_coord;
  const int step = dir == Dir::plus ? 1 : grid_[mu] - 1;
  g[mu] = (g[mu] + step) % grid_[mu];
  return static_cast<int>(mixed_radix(grid_, g));
}

}  // namespace lqml
