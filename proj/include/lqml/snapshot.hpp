#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "lqml/field.hpp"
#include "lqml/gauge.hpp"
#include "lqml/geometry.hpp"

namespace lqml {

// Little-endian snapshot files.
//
//   spinor: "LQML" u32 version, u32 dims[4], u32 s, u32 b, u8 layout, complex doubles
//   gauge:  "LQMG" u32 version, u32 dims[4], complex doubles ([site][mu][3x3])
//   clover: "LQMC" u32 version, u32 dims[4], complex doubles ([site][42])
//
// Complex values are interleaved (re, im) IEEE-754 doubles in storage order.

constexpr std::uint32_t kSnapshotVersion = 1;

struct SpinorSnapshot {
  Extents dims{};
  BlockSpinorField field;
};
struct GaugeSnapshot {
  Extents dims{};
  GaugeField field;
};
struct CloverSnapshot {
  Extents dims{};
  CloverField field;
};

void write_spinor(std::ostream& os, const Extents& dims, const BlockSpinorField& v);
SpinorSnapshot read_spinor(std::istream& is);
void write_gauge(std::ostream& os, const Extents& dims, const GaugeField& u);
GaugeSnapshot read_gauge(std::istream& is);
void write_clover(std::ostream& os, const Extents& dims, const CloverField& c);
CloverSnapshot read_clover(std::istream& is);

void save_spinor(const std::string& path, const Extents& dims, const BlockSpinorField& v);
SpinorSnapshot load_spinor(const std::string& path);
void save_gauge(const std::string& path, const Extents& dims, const GaugeField& u);
GaugeSnapshot load_gauge(const std::string& path);
void save_clover(const std::string& path, const Extents& dims, const CloverField& c);
CloverSnapshot load_clover(const std::string& path);

}  // namespace lqml
