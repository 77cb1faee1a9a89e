#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdsplit/block_vector.hpp"
#include "pdsplit/grid.hpp"
#include "pdsplit/prox.hpp"
#include "pdsplit/step_rules.hpp"

namespace pdsplit {

// K(x, y) and its partial derivatives. The callbacks are pure and safe to
// call concurrently.
struct Coupling {
  std::function<double(const BlockVector& x, const BlockVector& y)> value;
  std::function<BlockVector(const BlockVector& x, const BlockVector& y)> grad_x;
  std::function<BlockVector(const BlockVector& x, const BlockVector& y)> grad_y;
};

// Region on which local Lipschitz constants are valid. The membership test
// is problem-specific (box on x, ball on a dual block, ...).
struct Region {
  std::string description;
  std::function<bool(const PrimalDual&)> contains;
};

struct CouplingMeta {
  bool affine_in_y = false;  // D_y K(x, .) constant in y
  bool bilinear = false;     // K(x, y) = <Ax, y>
  double cauchy_beta = 0.0;  // beta in the inertial Cauchy bound (1 if bilinear)
  std::optional<double> l_dk;     // Lipschitz factor of DK
  std::optional<double> l_dk_y;   // Lipschitz factor of D_y K(x, .)
  std::optional<double> norm_a;   // ||A|| for bilinear K
  std::optional<double> l_a;      // Lipschitz factor of A for K = <A(x), y>
  std::optional<double> l_da;     // Lipschitz factor of DA
  // Two-block couplings K = <A1(x), y1> + <A2 x, y2>:
  std::optional<double> l_a1;
  std::optional<double> l_da1;
  std::optional<double> norm_a2;
  std::optional<double> rho_y1;   // declared ball bound on y1
  std::optional<Region> region;
  bool local = false;  // constants valid only within region
};

// The full saddle-point problem: per-block F and G_* prox functions, the
// coupling K, and Lipschitz metadata feeding the step-length certificates.
struct SaddleProblem {
  std::string kind = "custom";
  std::vector<std::size_t> primal_layout;
  std::vector<std::size_t> dual_layout;
  std::vector<ProxFunction> f_blocks;
  std::vector<ProxFunction> gstar_blocks;
  Coupling coupling;
  CouplingMeta meta;

  // Problem data retained for gap evaluation (rof, potts).
  std::vector<double> data_image;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double alpha = 0.0;

  double f_value(const BlockVector& x) const;
  double gstar_value(const BlockVector& y) const;
  BlockVector prox_f(std::span<const double> taus, const BlockVector& v) const;
  BlockVector prox_gstar(std::span<const double> sigmas, const BlockVector& v) const;

  void check_layouts(const PrimalDual& u) const;
};

struct CouplingEval {
  double k = 0.0;
  BlockVector dx;
  BlockVector dy;
  bool in_region = true;  // false when a declared region exists and u left it
};

// K(u), D_x K(u), D_y K(u). Throws NumericError naming the offending
// component when a callback produces a non-finite value.
CouplingEval coupling_eval(const SaddleProblem& p, const PrimalDual& u);

// ||u - T(u)|| where T is one primal-dual iteration from u with both
// extrapolation points set to u, so T(u) = u exactly at points satisfying
// the first-order conditions.
double optimality_residual(const SaddleProblem& p, const StepLengths& steps,
                           const PrimalDual& u);

struct ReferencePoint {
  enum class Provenance { Analytic, KktSolve, LongRun };
  PrimalDual u;
  Provenance provenance = Provenance::Analytic;
  double residual_tol = 0.0;  // declared bound on optimality_residual(u)
};

// Parameters for the shipped problem factories. Unused fields are ignored
// by factories that do not need them.
struct ProblemParams {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> image;     // data term reference b
  double alpha = 0.1;            // TV weight / ball radius

  // Declared region bounds for local Lipschitz constants.
  double omega_x = 1.0;          // |x_i| <= omega_x
  double omega_y = 1.0;          // ball bound on the relevant dual block
  bool project_dual_ball = false;

  // two_block: data target for the nonlinear measurement A1(x) = x^2/2.
  std::vector<double> target1;
  std::string f_kind = "quadratic";  // "quadratic" | "zero"

  // fb: E(x) = sum_i (q_i x_i^2 / 2 - c_i x_i).
  std::vector<double> quad_diag;
  std::vector<double> lin_coef;

  std::uint64_t norm_seed = 0x9e3779b97f4a7c15ull;
  int norm_iters = 600;
};

// Wires one of the shipped problems: "rof", "two_block", "potts", "fb".
SaddleProblem make_problem(const std::string& name, const ProblemParams& params);

// max over the grid s in [-s_bound, s_bound] (step s_step) of rho(s*t) for
// rho(t) = 2t - t^2; equals |t|_0 in the limit of a dense grid.
double potts_zero_function_check(double t, double s_bound, double s_step);

}  // namespace pdsplit
