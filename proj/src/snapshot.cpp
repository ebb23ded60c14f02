#include "lqml/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>

#include "lqml/errors.hpp"

namespace lqml {

namespace {

constexpr std::array<char, 4> kSpinorMagic = {'L', 'Q', 'M', 'L'};
constexpr std::array<char, 4> kGaugeMagic = {'L', 'Q', 'M', 'G'};
constexpr std::array<char, 4> kCloverMagic = {'L', 'Q', 'M', 'C'};

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> buf{};
  for (std::size_t b = 0; b < sizeof(U); ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
  os.write(buf.data(), buf.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> buf{};
  is.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!is) throw ValidationError("snapshot: truncated header");
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(buf[b]) << (8 * b);
  return v;
}

void put_complex(std::ostream& os, std::span<const Complex> data) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size_bytes()));
  } else {
    for (const Complex& c : data) {
      put_le(os, std::bit_cast<std::uint64_t>(c.real()));
      put_le(os, std::bit_cast<std::uint64_t>(c.imag()));
    }
  }
}

void get_complex(std::istream& is, std::span<Complex> data) {
  if constexpr (std::endian::native == std::endian::little) {
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    if (!is) throw ValidationError("snapshot: truncated payload");
  } else {
    for (Complex& c : data) {
      const double re = std::bit_cast<double>(get_le<std::uint64_t>(is));
      const double im = std::bit_cast<double>(get_le<std::uint64_t>(is));
      c = {re, im};
    }
  }
}

void put_header(std::ostream& os, const std::array<char, 4>& magic, const Extents& dims) {
  os.write(magic.data(), magic.size());
  put_le<std::uint32_t>(os, kSnapshotVersion);
  for (int d : dims) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(d));
}

Extents get_header(std::istream& is, const std::array<char, 4>& magic) {
  std::array<char, 4> m{};
  is.read(m.data(), m.size());
  if (!is || m != magic) {
    throw ValidationError("snapshot: bad magic, expected " + std::string(magic.data(), 4));
  }
  const auto version = get_le<std::uint32_t>(is);
  if (version != kSnapshotVersion) {
    throw ValidationError("snapshot: unsupported version " + std::to_string(version));
  }
  Extents dims{};
  for (int& d : dims) d = static_cast<int>(get_le<std::uint32_t>(is));
  return dims;
}

std::size_t site_count(const Extents& dims) {
  return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * dims[3];
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path + " for reading");
  return is;
}

}  // namespace

void write_spinor(std::ostream& os, const Extents& dims, const BlockSpinorField& v) {
  put_header(os, kSpinorMagic, dims);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(v.components()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(v.block()));
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(v.layout()));
  put_complex(os, v.data());
}

SpinorSnapshot read_spinor(std::istream& is) {
  SpinorSnapshot snap;
  snap.dims = get_header(is, kSpinorMagic);
  const auto s = static_cast<int>(get_le<std::uint32_t>(is));
  const auto b = static_cast<int>(get_le<std::uint32_t>(is));
  const Layout layout = layout_from_int(get_le<std::uint8_t>(is));
  snap.field = BlockSpinorField(site_count(snap.dims), s, {layout, b});
  get_complex(is, snap.field.data());
  return snap;
}

void write_gauge(std::ostream& os, const Extents& dims, const GaugeField& u) {
  put_header(os, kGaugeMagic, dims);
  put_complex(os, u.data());
}

GaugeSnapshot read_gauge(std::istream& is) {
  GaugeSnapshot snap;
  snap.dims = get_header(is, kGaugeMagic);
  snap.field = GaugeField(site_count(snap.dims));
  get_complex(is, snap.field.data());
  return snap;
}

void write_clover(std::ostream& os, const Extents& dims, const CloverField& c) {
  put_header(os, kCloverMagic, dims);
  put_complex(os, c.data());
}

CloverSnapshot read_clover(std::istream& is) {
  CloverSnapshot snap;
  snap.dims = get_header(is, kCloverMagic);
  snap.field = CloverField(site_count(snap.dims));
  get_complex(is, snap.field.data());
  return snap;
}

void save_spinor(const std::string& path, const Extents& dims, const BlockSpinorField& v) {
  auto os = open_out(path);
  write_spinor(os, dims, v);
}
SpinorSnapshot load_spinor(const std::string& path) {
  auto is = open_in(path);
  return read_spinor(is);
}
void save_gauge(const std::string& path, const Extents& dims, const GaugeField& u) {
  auto os = open_out(path);
  write_gauge(os, dims, u);
}
GaugeSnapshot load_gauge(const std::string& path) {
  auto is = open_in(path);
  return read_gauge(is);
}
void save_clover(const std::string& path, const Extents& dims, const CloverField& c) {
  auto os = open_out(path);
  write_clover(os, dims, c);
}
CloverSnapshot load_clover(const std::string& path) {
  auto is = open_in(path);
  return read_clover(is);
}

}  // namespace lqml
