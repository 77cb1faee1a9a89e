#pragma once

#include <cstdint>
#include <optional>

#include "pdsplit/block_vector.hpp"
#include "pdsplit/saddle.hpp"
#include "pdsplit/step_rules.hpp"
#include "pdsplit/trace.hpp"

namespace pdsplit {

struct SolverOptions {
  long max_iter = 1000;
  double tol = 0.0;        // stop when optimality_residual <= tol (0 = never)
  long monitor_every = 1;  // residual check and record cadence
  std::optional<PrimalDual> reference;  // ubar for B0/gap/Fejer records
  std::uint64_t seed = 0;
  bool ergodic = false;       // keep iterates and the final ergodic average
  std::optional<double> dual_ball;  // log ||y|| leaving B(0, rho_y)
  int dual_ball_block = -1;         // dual block to monitor; -1 = full y
  bool uncertified = false;   // skip solver-side certificate enforcement
  bool record_wall_time = false;
};

// PDPS for K affine in y (single tau, sigma). Non-affine couplings are
// rejected and directed to solve_modified_pdps.
IterationTrace solve_pdps(const SaddleProblem& p, const StepLengths& steps,
                          const PrimalDual& u0, const SolverOptions& opts);

// Block-adapted PDPS for K affine in y: all primal blocks with per-block
// tau_j, then all dual blocks with per-block sigma_l.
IterationTrace solve_block_pdps(const SaddleProblem& p, const StepLengths& steps,
                                const PrimalDual& u0, const SolverOptions& opts);

// Inertial PDPS for bilinear K; the lambda schedule must pass
// certify_inertia unless opts.uncertified.
IterationTrace solve_inertial_pdps(const SaddleProblem& p,
                                   const StepLengths& steps,
                                   const PrimalDual& u0,
                                   const SolverOptions& opts);

// Modified PDPS for K not affine in y; steps must pass certify_modified_k
// on the declared region unless opts.uncertified. Reduces exactly to PDPS
// when the coupling is affine in y.
IterationTrace solve_modified_pdps(const SaddleProblem& p,
                                   const StepLengths& steps,
                                   const PrimalDual& u0,
                                   const SolverOptions& opts);

// (1/N) sum of u^1..u^N over the stored iterate history; requires a trace
// recorded with opts.ergodic and N >= 1.
PrimalDual ergodic_average(const IterationTrace& trace, long upto);

}  // namespace pdsplit
