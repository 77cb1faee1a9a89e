#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pdsplit/block_vector.hpp"
#include "pdsplit/saddle.hpp"
#include "pdsplit/step_rules.hpp"

namespace pdsplit {

// Generating function for a Bregman divergence. Shipped kinds are the
// per-block weighted quadratic J(v) = sum_b (w_b/2)||v_b||^2 and the
// saddle-composite J0(x, y) = J_X(x) + J_Y(y) - K(x, y) with weights
// 1/tau_j and 1/sigma_l. Arbitrary generators are admitted through value
// and derivative callbacks.
class Generator {
 public:
  static Generator quadratic(std::vector<std::size_t> layout,
                             std::vector<double> weights);

  // J0 for the given problem and steps. Evaluation points are the
  // concatenation (primal blocks, dual blocks); see pd_concat.
  static Generator saddle_composite(const SaddleProblem& p,
                                    const StepLengths& steps);

  static Generator custom(
      std::vector<std::size_t> layout,
      std::function<double(const BlockVector&)> value,
      std::function<BlockVector(const BlockVector&)> derivative);

  double value(const BlockVector& v) const;
  BlockVector derivative(const BlockVector& v) const;
  const std::vector<std::size_t>& layout() const { return layout_; }
  bool is_quadratic() const { return kind_ == Kind::Quadratic; }
  bool has_coupling() const { return kind_ == Kind::SaddleComposite; }

  // Per-block weights of the quadratic part; empty for custom generators.
  const std::vector<double>& block_weights() const { return weights_; }

  // B_K(zu, xu) for the coupling of a saddle-composite generator; zero for
  // the other kinds (their coupling part is empty).
  double coupling_divergence(const BlockVector& z, const BlockVector& x) const;

 private:
  enum class Kind { Quadratic, SaddleComposite, Custom };

  Generator() = default;

  Kind kind_ = Kind::Quadratic;
  std::vector<std::size_t> layout_;
  std::vector<double> weights_;  // per block; empty for Custom
  std::shared_ptr<const SaddleProblem> problem_;
  std::size_t primal_blocks_ = 0;
  std::function<double(const BlockVector&)> value_fn_;
  std::function<BlockVector(const BlockVector&)> deriv_fn_;

  friend struct GeneratorAccess;
};

struct DivergenceValue {
  double value = 0.0;
  BlockVector grad1;  // derivative of B_J(., x) at the first argument z
};

// B_J(z, x) = J(z) - J(x) - <DJ(x), z - x> and its first-argument derivative
// DJ(z) - DJ(x). For quadratic and saddle-composite generators the quadratic
// part is evaluated on differences, which is algebraically identical and
// avoids cancellation.
DivergenceValue bregman_value(const Generator& J, const BlockVector& z,
                              const BlockVector& x);

// Convenience for saddle-composite generators: B_J0(zu, xu) on iterate pairs.
double bregman_pd(const Generator& J, const PrimalDual& z, const PrimalDual& x);

// <DJ(x) - DJ(z), x - xbar> - [B_J(xbar, x) - B_J(xbar, z) + B_J(x, z)];
// identically zero in exact arithmetic for every generator.
double three_point_residual(const Generator& J, const BlockVector& x,
                            const BlockVector& z, const BlockVector& xbar);

// Sampling region for the ellipticity probe.
struct SampleRegion {
  enum class Kind { Box, Ball };
  static SampleRegion box(double lo, double hi);
  static SampleRegion ball(BlockVector center, double radius);

  Kind kind = Kind::Box;
  double lo = 0.0, hi = 0.0;
  BlockVector center;
  double radius = 0.0;
};

struct ProbeReport {
  double min_margin = 0.0;
  BlockVector witness_z;
  BlockVector witness_x;
};

// min over sampled pairs (z, x) of B_J(z, x) - (gamma/2)||z - x||^2 with the
// minimising pair; deterministic given the seed.
ProbeReport ellipticity_probe(const Generator& J, const SampleRegion& region,
                              double gamma, int n_samples, std::uint64_t seed);

struct CauchyReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Checks |<D1 B_J(x, y), z - x>| <= (L/alpha) B_J(x, y) + (alpha/gamma) B_J(z, x)
// for a gamma-strongly subdifferentiable J with L-smooth derivative.
CauchyReport cauchy_bound_check(const Generator& J, const BlockVector& x,
                                const BlockVector& y, const BlockVector& z,
                                double alpha, double gamma, double L);

}  // namespace pdsplit
