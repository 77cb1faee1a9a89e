#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pdsplit/block_vector.hpp"

namespace pdsplit {

enum class ProxKind {
  QuadraticData,   // (1/2)||x - b||^2
  ScaledL1,        // alpha * ||x||_1
  Ball2Pointwise,  // indicator of { ||x_p||_2 <= alpha } per pixel 2-vector
  IndicatorZero,   // indicator of {0}
  Zero,            // constant 0
};

// One F or G_* building block: value, closed-form proximal map, and the
// strong-subdifferentiability modulus gamma it contributes at a solution.
class ProxFunction {
 public:
  static ProxFunction quadratic_data(std::vector<double> b);
  static ProxFunction scaled_l1(double alpha);
  static ProxFunction ball2_pointwise(double alpha);
  static ProxFunction indicator_zero();
  static ProxFunction zero();

  ProxKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& reference() const { return b_; }

  // May return +infinity for indicator kinds.
  double value(std::span<const double> x) const;

  // argmin_w  tau*f(w) + (1/2)||w - x||^2, written into out. tau > 0.
  void prox(double tau, std::span<const double> x, std::span<double> out) const;

 private:
  ProxFunction(ProxKind kind, std::vector<double> b, double alpha, double gamma)
      : kind_(kind), b_(std::move(b)), alpha_(alpha), gamma_(gamma) {}

  ProxKind kind_;
  std::vector<double> b_;
  double alpha_ = 0.0;
  double gamma_ = 0.0;
};

// Single-block convenience wrapper around ProxFunction::prox.
BlockVector prox_apply(const ProxFunction& f, double tau, const BlockVector& x);

// Brute-force prox for entrywise-separable f: per entry, a coarse grid of at
// least 1000 points over [lo, hi] seeds a golden-section refinement of
// w -> tau*f(w) + (w - x_i)^2 / 2 down to interval width <= tol. The value
// callback receives (entry index, w) and may return +infinity.
std::vector<double> prox_oracle(
    const std::function<double(std::size_t, double)>& f_value, double tau,
    std::span<const double> x, double lo, double hi, double tol);

}  // namespace pdsplit
