#pragma once

#include <cstddef>
#include <span>

#include "pdsplit/block_vector.hpp"

namespace pdsplit {

// Forward-difference discrete gradient on a rows x cols grid with replicate
// (Neumann) boundary: the difference across the last row/column is zero.
// Images are row-major scalars of length rows*cols; gradient fields store the
// per-pixel 2-vector (row difference, column difference) interleaved, so the
// field has length 2*rows*cols and pixel p owns entries 2p and 2p+1.
class GridGradient {
 public:
  GridGradient(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t image_size() const { return rows_ * cols_; }
  std::size_t field_size() const { return 2 * rows_ * cols_; }

  void apply(std::span<const double> image, std::span<double> field) const;

  // Adjoint (negative divergence with matching boundary):
  // <apply(x), y> = <x, adjoint(y)> exactly up to rounding.
  void adjoint(std::span<const double> field, std::span<double> image) const;

  BlockVector apply(const BlockVector& image) const;
  BlockVector adjoint(const BlockVector& field) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
};

}  // namespace pdsplit
