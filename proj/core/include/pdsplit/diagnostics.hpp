#pragma once

#include <span>
#include <utility>

#include "pdsplit/block_vector.hpp"
#include "pdsplit/bregman.hpp"
#include "pdsplit/saddle.hpp"
#include "pdsplit/step_rules.hpp"
#include "pdsplit/trace.hpp"

namespace pdsplit {

// L(x, y) = F(x) + K(x, y) - G_*(y); may be +-infinity for indicator blocks.
double lagrangian_value(const SaddleProblem& p, const BlockVector& x,
                        const BlockVector& y);

// Lagrangian gap L(x, ybar) - L(xbar, y); non-negative whenever ubar solves
// the first-order system and the problem is convex-concave.
double lagrangian_gap(const SaddleProblem& p, const PrimalDual& u,
                      const PrimalDual& ubar);

// a_K(u, ubar) = K(u) - K(ubar) + <D_x K(u), xbar - x> + <D_y K(ubar), ybar - y>.
double a_k_value(const SaddleProblem& p, const PrimalDual& u,
                 const PrimalDual& ubar);

// B0(ubar, u_k) - [B0(ubar, u_k1) + B0(u_k1, u_k) + gap_value]; non-negative
// up to rounding on any run whose growth condition holds with the given gap.
double fejer_residual(const SaddleProblem& p, const StepLengths& steps,
                      const PrimalDual& ubar, const PrimalDual& u_k,
                      const PrimalDual& u_k1, double gap_value);

enum class GrowthMode { ConvexConcave, LipschitzK, AffineYA, AffineYB };

struct GrowthConstants {
  double gamma_f = 0.0;
  double gamma_gstar = 0.0;
  double l_dk = 0.0;      // LipschitzK
  double l_da = 0.0;      // AffineYA / AffineYB
  double rho_y = 0.0;     // AffineYA
  double rho_x_bar = 0.0; // AffineYB
  double alpha = 1.0;     // AffineYB
};

struct GrowthGapValue {
  double value = 0.0;
  bool nonneg_guaranteed = false;
};

// The mode's gap functional value at (u, ubar) and whether its coefficient
// conditions guarantee non-negativity.
GrowthGapValue growth_gap(const SaddleProblem& p, const PrimalDual& u,
                          const PrimalDual& ubar, GrowthMode mode,
                          const GrowthConstants& constants);

struct DescentReport {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs before tolerance
  bool ergodic_holds = false;
  double ergodic_gap = 0.0;
  double ergodic_bound = 0.0;
};

// Checks the telescoped descent inequality over the stored iterate history:
//   c*B0(ubar, u^N) + c*sum_{k<N} B0(u^{k+1}, u^k) + sum_{k<N} gap_k
//     <= s*B0(ubar, u^0) + tol,
// plus the ergodic consequence G_L(utilde^N, ubar) <= s*B0(ubar, u^0)/N + tol.
// c and s default to 1; the inertial variant uses c = eps, s = 1 - lambda_1.
// The trace must have been recorded with SolverOptions::ergodic.
DescentReport descent_check(const IterationTrace& trace, const SaddleProblem& p,
                            const StepLengths& steps, const PrimalDual& ubar,
                            std::span<const double> gaps, long N,
                            double b0_coeff = 1.0, double rhs_scale = 1.0);

// ROF duality gap: [||x - b||^2/2 + alpha*sum_p ||(grad x)_p||]
// - [<grad^T y, b> - ||grad^T y||^2/2]; +infinity when y is infeasible.
double duality_gap_rof(const SaddleProblem& p, const PrimalDual& u,
                       std::span<const double> b, double alpha);

enum class RateModel { Power, Geometric };

struct RateFitResult {
  double coefficient = 0.0;  // exponent (power) or ratio (geometric)
  double fit_error = 0.0;    // RMS log-residual / max(1, log-value range)
};

// Least squares on the tail half of the series: log v against log k (power)
// or against k (geometric). Requires >= 10 samples, all values > 0.
RateFitResult rate_fit(std::span<const std::pair<double, double>> series,
                       RateModel model);

}  // namespace pdsplit
