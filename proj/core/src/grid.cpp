#include "pdsplit/grid.hpp"

#include "pdsplit/errors.hpp"

namespace pdsplit {

void GridGradient::apply(std::span<const double> image,
                         std::span<double> field) const {
  if (image.size() != image_size() || field.size() != field_size())
    throw LayoutError("GridGradient::apply: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const std::size_t p = i * cols_ + j;
      field[2 * p] = (i + 1 < rows_) ? image[p + cols_] - image[p] : 0.0;
      field[2 * p + 1] = (j + 1 < cols_) ? image[p + 1] - image[p] : 0.0;
    }
  }
}

void GridGradient::adjoint(std::span<const double> field,
                           std::span<double> image) const {
  if (image.size() != image_size() || field.size() != field_size())
    throw LayoutError("GridGradient::adjoint: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const std::size_t p = i * cols_ + j;
      double v = 0.0;
      if (i > 0) v += field[2 * (p - cols_)];
      if (i + 1 < rows_) v -= field[2 * p];
      if (j > 0) v += field[2 * (p - 1) + 1];
      if (j + 1 < cols_) v -= field[2 * p + 1];
      image[p] = v;
    }
  }
}

BlockVector GridGradient::apply(const BlockVector& image) const {
  BlockVector out(std::vector<std::size_t>{field_size()});
  apply(image.entries(), out.entries());
  return out;
}

BlockVector GridGradient::adjoint(const BlockVector& field) const {
  BlockVector out(std::vector<std::size_t>{image_size()});
  adjoint(field.entries(), out.entries());
  return out;
}

}  // namespace pdsplit
