#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lqml {

using Complex = std::complex<double>;

/// Storage order of the per-site s x b block Row_x(V).
///  column_major (layout 1): rhs-major, offset i*s + k
///  row_major    (layout 2): component-major, offset k*b + i
enum class Layout : std::uint8_t { column_major = 1, row_major = 2 };

std::string to_string(Layout l);
Layout layout_from_int(int tag);

struct LayoutPolicy {
  Layout layout = Layout::column_major;
  int b = 1;

  friend bool operator==(const LayoutPolicy&, const LayoutPolicy&) = default;
};

constexpr int kSpinorComponents = 12;
constexpr int kHalfSpinorComponents = 6;

/// Offset of (component k, rhs i) inside one site block, no range checks.
template <Layout L>
constexpr std::size_t block_offset(int k, int i, int s, int b) {
  if constexpr (L == Layout::column_major) {
    return static_cast<std::size_t>(i) * s + k;
  } else {
    return static_cast<std::size_t>(k) * b + i;
  }
}

/// Checked array offset of (site x, component k, rhs i): x*s*b + block offset.
std::size_t element_offset(const LayoutPolicy& policy, int s, std::size_t x, int k, int i);

/// A block of b spinor-like vectors with s complex components per site.
/// Site blocks are contiguous and ordered by ascending site number.
class BlockSpinorField {
 public:
  BlockSpinorField() = default;
  BlockSpinorField(std::size_t sites, int s, LayoutPolicy policy);

  std::size_t sites() const noexcept { return sites_; }
  int components() const noexcept { return s_; }
  int block() const noexcept { return policy_.b; }
  Layout layout() const noexcept { return policy_.layout; }
  const LayoutPolicy& policy() const noexcept { return policy_; }
  std::size_t site_stride() const noexcept { return static_cast<std::size_t>(s_) * policy_.b; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }
  Complex* site_ptr(std::size_t x) noexcept { return data_.data() + x * site_stride(); }
  const Complex* site_ptr(std::size_t x) const noexcept {
    return data_.data() + x * site_stride();
  }

  Complex& at(std::size_t x, int k, int i);
  const Complex& at(std::size_t x, int k, int i) const;

  void set_zero();

  /// Same shape and layout.
  bool same_shape(const BlockSpinorField& other) const noexcept {
    return sites_ == other.sites_ && s_ == other.s_ && policy_ == other.policy_;
  }

 private:
  std::size_t sites_ = 0;
  int s_ = 0;
  LayoutPolicy policy_{};
  std::vector<Complex> data_;
};

/// Value-preserving permutation into another layout.
BlockSpinorField convert_layout(const BlockSpinorField& src, Layout target);

/// Column i as a b = 1 field, and the inverse insertion.
BlockSpinorField extract_rhs(const BlockSpinorField& v, int i);
void insert_rhs(const BlockSpinorField& column, int i, BlockSpinorField& v);

/// Fill with independent complex Gaussians in (x, k, i) order, so the content
/// does not depend on the layout.
void fill_gaussian(BlockSpinorField& v, std::uint64_t seed);

/// y(i) += alpha(i) * x(i)
void block_axpy(std::span<const Complex> alpha, const BlockSpinorField& x, BlockSpinorField& y);
/// y(i) *= alpha(i)
void block_scale(std::span<const Complex> alpha, BlockSpinorField& y);
/// Per-rhs 2-norms.
std::vector<double> block_norms(const BlockSpinorField& v);

enum class DotStrategy : std::uint8_t { naive, deferred_separation };

/// Accumulator width, in complex lanes, of the deferred-separation dot product.
constexpr int kDotLanes = 8;

/// h(i) = sum_x,k conj(w(x,k,i)) * e(x,k,i).
///
/// naive separates every product into its rhs bucket immediately.
/// deferred_separation streams the data through a lane-parallel accumulator
/// whose width is a multiple of b, and only folds lanes into per-rhs totals
/// at the end.
std::vector<Complex> block_dot(const BlockSpinorField& w, const BlockSpinorField& e,
                               DotStrategy strategy = DotStrategy::deferred_separation);

}  // namespace lqml
