#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pdsplit {

// Dense real vector partitioned into blocks. Primal and dual iterates, and
// their concatenation u = (x, y), are all BlockVectors. Reductions run in
// fixed block-then-entry order so repeated runs are bit-identical.
class BlockVector {
 public:
  BlockVector() = default;

  // Zero vector with the given block layout.
  explicit BlockVector(std::vector<std::size_t> layout);

  // Takes ownership of data; total length must match the layout.
  BlockVector(std::vector<std::size_t> layout, std::vector<double> data);

  // Single-block vector.
  static BlockVector single(std::vector<double> data);

  const std::vector<std::size_t>& layout() const { return layout_; }
  std::size_t block_count() const { return layout_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<double> block(std::size_t i);
  std::span<const double> block(std::size_t i) const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> entries() { return data_; }
  std::span<const double> entries() const { return data_; }

  bool same_layout(const BlockVector& other) const;
  bool all_finite() const;

 private:
  std::vector<std::size_t> layout_;
  std::vector<std::size_t> offsets_;
  std::vector<double> data_;
};

// <a, b> over all entries, fixed summation order. Layouts must match.
double bv_dot(const BlockVector& a, const BlockVector& b);

// alpha*a + beta*b entrywise. Layouts must match.
BlockVector bv_combine(double alpha, const BlockVector& a, double beta,
                       const BlockVector& b);

// sqrt(bv_dot(a, a)).
double norm2(const BlockVector& a);

// Joint primal-dual iterate u = (x, y).
struct PrimalDual {
  BlockVector x;
  BlockVector y;
};

double pd_dot(const PrimalDual& a, const PrimalDual& b);
PrimalDual pd_combine(double alpha, const PrimalDual& a, double beta,
                      const PrimalDual& b);
double pd_norm2(const PrimalDual& a);

// Concatenation of the primal blocks followed by the dual blocks.
BlockVector pd_concat(const PrimalDual& u);

// Inverse of pd_concat given the number of primal blocks.
PrimalDual pd_split(const BlockVector& u, std::size_t primal_blocks);

}  // namespace pdsplit
