#include "pdsplit/block_vector.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {

std::vector<std::size_t> make_offsets(const std::vector<std::size_t>& layout) {
  std::vector<std::size_t> offsets(layout.size(), 0);
  std::size_t off = 0;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    offsets[i] = off;
    off += layout[i];
  }
  return offsets;
}

}  // namespace

BlockVector::BlockVector(std::vector<std::size_t> layout)
    : layout_(std::move(layout)), offsets_(make_offsets(layout_)) {
  std::size_t total = 0;
  for (std::size_t n : layout_) total += n;
  data_.assign(total, 0.0);
}

BlockVector::BlockVector(std::vector<std::size_t> layout, std::vector<double> data)
    : layout_(std::move(layout)),
      offsets_(make_offsets(layout_)),
      data_(std::move(data)) {
  std::size_t total = 0;
  for (std::size_t n : layout_) total += n;
  if (total != data_.size())
    throw LayoutError("BlockVector: data length does not match layout");
}

BlockVector BlockVector::single(std::vector<double> data) {
  std::vector<std::size_t> layout{data.size()};
  return BlockVector(std::move(layout), std::move(data));
}

std::span<double> BlockVector::block(std::size_t i) {
  return {data_.data() + offsets_[i], layout_[i]};
}

std::span<const double> BlockVector::block(std::size_t i) const {
  return {data_.data() + offsets_[i], layout_[i]};
}

bool BlockVector::same_layout(const BlockVector& other) const {
  return layout_ == other.layout_;
}

bool BlockVector::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double bv_dot(const BlockVector& a, const BlockVector& b) {
  if (!a.same_layout(b)) throw LayoutError("bv_dot: layout mismatch");
  double s = 0.0;
  const std::span<const double> ae = a.entries();
  const std::span<const double> be = b.entries();
  for (std::size_t i = 0; i < ae.size(); ++i) s += ae[i] * be[i];
  return s;
}

BlockVector bv_combine(double alpha, const BlockVector& a, double beta,
                       const BlockVector& b) {
  if (!a.same_layout(b)) throw LayoutError("bv_combine: layout mismatch");
  BlockVector out(a.layout());
  const std::span<const double> ae = a.entries();
  const std::span<const double> be = b.entries();
  const std::span<double> oe = out.entries();
  for (std::size_t i = 0; i < ae.size(); ++i) oe[i] = alpha * ae[i] + beta * be[i];
  return out;
}

double norm2(const BlockVector& a) { return std::sqrt(bv_dot(a, a)); }

double pd_dot(const PrimalDual& a, const PrimalDual& b) {
  return bv_dot(a.x, b.x) + bv_dot(a.y, b.y);
}

PrimalDual pd_combine(double alpha, const PrimalDual& a, double beta,
                      const PrimalDual& b) {
  return {bv_combine(alpha, a.x, beta, b.x), bv_combine(alpha, a.y, beta, b.y)};
}

double pd_norm2(const PrimalDual& a) { return std::sqrt(pd_dot(a, a)); }

BlockVector pd_concat(const PrimalDual& u) {
  std::vector<std::size_t> layout = u.x.layout();
  layout.insert(layout.end(), u.y.layout().begin(), u.y.layout().end());
  std::vector<double> data(u.x.entries().begin(), u.x.entries().end());
  data.insert(data.end(), u.y.entries().begin(), u.y.entries().end());
  return BlockVector(std::move(layout), std::move(data));
}

PrimalDual pd_split(const BlockVector& u, std::size_t primal_blocks) {
  if (primal_blocks > u.block_count())
    throw LayoutError("pd_split: more primal blocks than blocks present");
  std::vector<std::size_t> xl(u.layout().begin(),
                              u.layout().begin() + primal_blocks);
  std::vector<std::size_t> yl(u.layout().begin() + primal_blocks,
                              u.layout().end());
  std::size_t nx = 0;
  for (std::size_t n : xl) nx += n;
  std::vector<double> xd(u.entries().begin(), u.entries().begin() + nx);
  std::vector<double> yd(u.entries().begin() + nx, u.entries().end());
  return {BlockVector(std::move(xl), std::move(xd)),
          BlockVector(std::move(yl), std::move(yd))};
}

}  // namespace pdsplit
