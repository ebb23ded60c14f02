#include "lqml/field.hpp"

#include <algorithm>
#include <cmath>

#include "lqml/errors.hpp"
#include "lqml/rng.hpp"

namespace lqml {

namespace {

void require_same_shape(const BlockSpinorField& a, const BlockSpinorField& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ValidationError(std::string(op) + ": field shapes or layouts differ");
  }
}

void require_alpha(std::span<const Complex> alpha, const BlockSpinorField& y, const char* op) {
  if (alpha.size() != static_cast<std::size_t>(y.block())) {
    throw ValidationError(std::string(op) + ": coefficient count " +
                          std::to_string(alpha.size()) + " != block size " +
                          std::to_string(y.block()));
  }
}

template <Layout L>
void axpy_impl(std::span<const Complex> alpha, const BlockSpinorField& x, BlockSpinorField& y) {
  const int s = x.components();
  const int b = x.block();
  const auto sites = static_cast<std::ptrdiff_t>(x.sites());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t site = 0; site < sites; ++site) {
    const Complex* xs = x.site_ptr(site);
    Complex* ys = y.site_ptr(site);
    if constexpr (L == Layout::column_major) {
      for (int i = 0; i < b; ++i) {
        const Complex a = alpha[i];
        for (int k = 0; k < s; ++k) ys[i * s + k] += a * xs[i * s + k];
      }
    } else {
      for (int k = 0; k < s; ++k) {
        for (int i = 0; i < b; ++i) ys[k * b + i] += alpha[i] * xs[k * b + i];
      }
    }
  }
}

template <Layout L>
void scale_impl(std::span<const Complex> alpha, BlockSpinorField& y) {
  const int s = y.components();
  const int b = y.block();
  const auto sites = static_cast<std::ptrdiff_t>(y.sites());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t site = 0; site < sites; ++site) {
    Complex* ys = y.site_ptr(site);
    if constexpr (L == Layout::column_major) {
      for (int i = 0; i < b; ++i)
        for (int k = 0; k < s; ++k) ys[i * s + k] *= alpha[i];
    } else {
      for (int k = 0; k < s; ++k)
        for (int i = 0; i < b; ++i) ys[k * b + i] *= alpha[i];
    }
  }
}

template <Layout L>
std::vector<double> norms_impl(const BlockSpinorField& v) {
  const int s = v.components();
  const int b = v.block();
  std::vector<double> acc(b, 0.0);
  for (std::size_t site = 0; site < v.sites(); ++site) {
    const Complex* p = v.site_ptr(site);
    if constexpr (L == Layout::column_major) {
      for (int i = 0; i < b; ++i)
        for (int k = 0; k < s; ++k) acc[i] += std::norm(p[i * s + k]);
    } else {
      for (int k = 0; k < s; ++k)
        for (int i = 0; i < b; ++i) acc[i] += std::norm(p[k * b + i]);
    }
  }
  for (double& a : acc) a = std::sqrt(a);
  return acc;
}

std::vector<Complex> dot_naive(const BlockSpinorField& w, const BlockSpinorField& e) {
  const int s = w.components();
  const int b = w.block();
  std::vector<Complex> h(b, Complex{});
  const bool rhs_major = w.layout() == Layout::column_major;
  for (std::size_t site = 0; site < w.sites(); ++site) {
    const Complex* ws = w.site_ptr(site);
    const Complex* es = e.site_ptr(site);
    for (int k = 0; k < s; ++k) {
      for (int i = 0; i < b; ++i) {
        const std::size_t o = rhs_major ? block_offset<Layout::column_major>(k, i, s, b)
                                        : block_offset<Layout::row_major>(k, i, s, b);
        h[i] += std::conj(ws[o]) * es[o];
      }
    }
  }
  return h;
}

// Interleaved data: element p of the whole array belongs to rhs p mod b. The
// accumulator width is a multiple of b, so lane l always holds rhs l mod b and
// no per-element separation is needed.
std::vector<Complex> dot_deferred_interleaved(const BlockSpinorField& w,
                                              const BlockSpinorField& e) {
  const int b = w.block();
  const int lanes = b >= kDotLanes ? b : b * ((kDotLanes + b - 1) / b);
  std::vector<Complex> acc(lanes, Complex{});
  const Complex* wp = w.data().data();
  const Complex* ep = e.data().data();
  const std::size_t n = w.size();
  const std::size_t full = n - n % lanes;
  for (std::size_t p = 0; p < full; p += lanes) {
    for (int l = 0; l < lanes; ++l) acc[l] += std::conj(wp[p + l]) * ep[p + l];
  }
  for (std::size_t p = full; p < n; ++p) acc[p - full] += std::conj(wp[p]) * ep[p];

  std::vector<Complex> h(b, Complex{});
  for (int l = 0; l < lanes; ++l) h[l % b] += acc[l];
  return h;
}

// rhs-major data: each (site, rhs) segment is contiguous; partial sums per
// (rhs, lane) are folded only at the end.
std::vector<Complex> dot_deferred_segmented(const BlockSpinorField& w,
                                            const BlockSpinorField& e) {
  const int s = w.components();
  const int b = w.block();
  std::vector<Complex> acc(static_cast<std::size_t>(b) * kDotLanes, Complex{});
  for (std::size_t site = 0; site < w.sites(); ++site) {
    const Complex* ws = w.site_ptr(site);
    const Complex* es = e.site_ptr(site);
    for (int i = 0; i < b; ++i) {
      Complex* a = acc.data() + static_cast<std::size_t>(i) * kDotLanes;
      for (int k = 0; k < s; ++k) a[k % kDotLanes] += std::conj(ws[i * s + k]) * es[i * s + k];
    }
  }
  std::vector<Complex> h(b, Complex{});
  for (int i = 0; i < b; ++i)
    for (int l = 0; l < kDotLanes; ++l) h[i] += acc[static_cast<std::size_t>(i) * kDotLanes + l];
  return h;
}

}  // namespace

std::string to_string(Layout l) { return l == Layout::column_major ? "1" : "2"; }

Layout layout_from_int(int tag) {
  if (tag == 1) return Layout::column_major;
  if (tag == 2) return Layout::row_major;
  throw ValidationError("layout must be 1 or 2, got " + std::to_string(tag));
}

std::size_t element_offset(const LayoutPolicy& policy, int s, std::size_t x, int k, int i) {
  if (s < 1 || k < 0 || k >= s || i < 0 || i >= policy.b) {
    throw std::out_of_range("element_offset: component " + std::to_string(k) + " / rhs " +
                            std::to_string(i) + " out of range for s=" + std::to_string(s) +
                            ", b=" + std::to_string(policy.b));
  }
  const std::size_t base = x * static_cast<std::size_t>(s) * policy.b;
  return base + (policy.layout == Layout::column_major
                     ? block_offset<Layout::column_major>(k, i, s, policy.b)
                     : block_offset<Layout::row_major>(k, i, s, policy.b));
}

BlockSpinorField::BlockSpinorField(std::size_t sites, int s, LayoutPolicy policy)
    : sites_(sites), s_(s), policy_(policy) {
  if (s < 1) throw ValidationError("component count must be positive");
  if (policy.b < 1) throw ValidationError("block size b must be >= 1");
  data_.assign(sites * s * policy.b, Complex{});
}

Complex& BlockSpinorField::at(std::size_t x, int k, int i) {
  if (x >= sites_) throw std::out_of_range("site " + std::to_string(x) + " out of range");
  return data_[element_offset(policy_, s_, x, k, i)];
}

const Complex& BlockSpinorField::at(std::size_t x, int k, int i) const {
  if (x >= sites_) throw std::out_of_range("site " + std::to_string(x) + " out of range");
  return data_[element_offset(policy_, s_, x, k, i)];
}

void BlockSpinorField::set_zero() { std::fill(data_.begin(), data_.end(), Complex{}); }

BlockSpinorField convert_layout(const BlockSpinorField& src, Layout target) {
  BlockSpinorField out(src.sites(), src.components(), {target, src.block()});
  const int s = src.components();
  const int b = src.block();
  if (src.layout() == target || b == 1) {
    std::copy(src.data().begin(), src.data().end(), out.data().begin());
    return out;
  }
  const bool to_row = target == Layout::row_major;
  for (std::size_t x = 0; x < src.sites(); ++x) {
    const Complex* in = src.site_ptr(x);
    Complex* o = out.site_ptr(x);
    for (int i = 0; i < b; ++i) {
      for (int k = 0; k < s; ++k) {
        if (to_row) {
          o[k * b + i] = in[i * s + k];
        } else {
          o[i * s + k] = in[k * b + i];
        }
      }
    }
  }
  return out;
}

BlockSpinorField extract_rhs(const BlockSpinorField& v, int i) {
  if (i < 0 || i >= v.block()) throw std::out_of_range("rhs index out of range");
  BlockSpinorField col(v.sites(), v.components(), {v.layout(), 1});
  for (std::size_t x = 0; x < v.sites(); ++x)
    for (int k = 0; k < v.components(); ++k) col.site_ptr(x)[k] = v.at(x, k, i);
  return col;
}

void insert_rhs(const BlockSpinorField& column, int i, BlockSpinorField& v) {
  if (column.block() != 1 || column.sites() != v.sites() ||
      column.components() != v.components()) {
    throw ValidationError("insert_rhs: column shape mismatch");
  }
  for (std::size_t x = 0; x < v.sites(); ++x)
    for (int k = 0; k < v.components(); ++k) v.at(x, k, i) = column.site_ptr(x)[k];
}

void fill_gaussian(BlockSpinorField& v, std::uint64_t seed) {
  Rng rng(seed);
  const LayoutPolicy& p = v.policy();
  const int s = v.components();
  for (std::size_t x = 0; x < v.sites(); ++x)
    for (int k = 0; k < s; ++k)
      for (int i = 0; i < p.b; ++i) v.data()[element_offset(p, s, x, k, i)] = rng.complex_gaussian();
}

void block_axpy(std::span<const Complex> alpha, const BlockSpinorField& x, BlockSpinorField& y) {
  require_same_shape(x, y, "block_axpy");
  require_alpha(alpha, y, "block_axpy");
  if (x.layout() == Layout::column_major) {
    axpy_impl<Layout::column_major>(alpha, x, y);
  } else {
    axpy_impl<Layout::row_major>(alpha, x, y);
  }
}

void block_scale(std::span<const Complex> alpha, BlockSpinorField& y) {
  require_alpha(alpha, y, "block_scale");
  if (y.layout() == Layout::column_major) {
    scale_impl<Layout::column_major>(alpha, y);
  } else {
    scale_impl<Layout::row_major>(alpha, y);
  }
}

std::vector<double> block_norms(const BlockSpinorField& v) {
  return v.layout() == Layout::column_major ? norms_impl<Layout::column_major>(v)
                                            : norms_impl<Layout::row_major>(v);
}

std::vector<Complex> block_dot(const BlockSpinorField& w, const BlockSpinorField& e,
                               DotStrategy strategy) {
  require_same_shape(w, e, "block_dot");
  if (strategy == DotStrategy::naive) return dot_naive(w, e);
  if (w.layout() == Layout::row_major || w.block() == 1) return dot_deferred_interleaved(w, e);
  return dot_deferred_segmented(w, e);
}

}  // namespace lqml
