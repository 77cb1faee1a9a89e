#include "pdsplit/solvers.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "pdsplit/bregman.hpp"
#include "pdsplit/diagnostics.hpp"
#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {

std::vector<double> expand(const std::vector<double>& v, std::size_t blocks,
                           const char* what) {
  if (v.size() == blocks) return v;
  if (v.size() == 1) return std::vector<double>(blocks, v[0]);
  throw InvalidArgument(std::string(what) +
                        ": step count does not match the block structure");
}

// Shared monitoring: residual records at the configured cadence, optional
// reference diagnostics, region and dual-ball logging, iterate storage.
class Monitor {
 public:
  Monitor(const SaddleProblem& p, const StepLengths& steps,
          const SolverOptions& opts)
      : p_(p), steps_(steps), opts_(opts) {
    if (opts.reference) {
      b0_.emplace(Generator::saddle_composite(p, steps));
      p.check_layouts(*opts.reference);
    }
    start_ = std::chrono::steady_clock::now();
  }

  void baseline(IterationTrace& trace, const PrimalDual& u0) {
    trace.initial_u = u0;
    IterationRecord rec;
    rec.k = 0;
    rec.residual = optimality_residual(p_, steps_, u0);
    if (opts_.reference) {
      b0_prev_ = bregman_pd(*b0_, *opts_.reference, u0);
      rec.b0_to_ref = b0_prev_;
      rec.lagrangian_gap = lagrangian_gap(p_, u0, *opts_.reference);
      rec.growth_gap = reference_gap(u0);
    }
    stamp(rec);
    trace.records.push_back(std::move(rec));
    check_region(trace, u0, 0);
  }

  // Returns true when the run should stop on tolerance.
  bool after_iteration(IterationTrace& trace, long k1, const PrimalDual& prev,
                       const PrimalDual& next) {
    if (!next.x.all_finite() || !next.y.all_finite())
      throw NumericError("solver: iterate became non-finite at iteration " +
                         std::to_string(k1));

    std::optional<double> fejer;
    std::optional<double> gap;
    if (opts_.reference) {
      const double b0_next = bregman_pd(*b0_, *opts_.reference, next);
      const double b0_step = bregman_pd(*b0_, next, prev);
      gap = reference_gap(next);
      fejer = b0_prev_ - b0_next - b0_step - *gap;
      b0_prev_ = b0_next;
      b0_next_cache_ = b0_next;
    }
    if (opts_.ergodic) trace.iterates.push_back(next);
    check_region(trace, next, k1);

    const bool cadence = (k1 % opts_.monitor_every == 0) || k1 == opts_.max_iter;
    if (!cadence) return false;

    IterationRecord rec;
    rec.k = k1;
    rec.residual = optimality_residual(p_, steps_, next);
    if (opts_.reference) {
      rec.b0_to_ref = b0_next_cache_;
      rec.lagrangian_gap = lagrangian_gap(p_, next, *opts_.reference);
      rec.fejer_margin = fejer;
      rec.growth_gap = gap;
    }
    stamp(rec);
    trace.records.push_back(std::move(rec));
    return opts_.tol > 0 && trace.records.back().residual <= opts_.tol;
  }

 private:
  double reference_gap(const PrimalDual& u) const {
    // Convex-concave growth gap with the problem's per-block moduli.
    double s = 0.0;
    for (std::size_t j = 0; j < p_.f_blocks.size(); ++j) {
      const double g = p_.f_blocks[j].gamma();
      if (g == 0) continue;
      auto a = u.x.block(j);
      auto b = opts_.reference->x.block(j);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += g * d * d;
      }
    }
    for (std::size_t l = 0; l < p_.gstar_blocks.size(); ++l) {
      const double g = p_.gstar_blocks[l].gamma();
      if (g == 0) continue;
      auto a = u.y.block(l);
      auto b = opts_.reference->y.block(l);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += g * d * d;
      }
    }
    return s;
  }

  void check_region(IterationTrace& trace, const PrimalDual& u, long k) {
    if (p_.meta.region && !trace.region_violated &&
        !p_.meta.region->contains(u)) {
      trace.region_violated = true;
      trace.region_first_violation = k;
    }
    if (opts_.dual_ball && !trace.dual_ball_violated) {
      double n = 0.0;
      if (opts_.dual_ball_block >= 0) {
        for (double v : u.y.block(static_cast<std::size_t>(opts_.dual_ball_block)))
          n += v * v;
      } else {
        n = bv_dot(u.y, u.y);
      }
      if (std::sqrt(n) > *opts_.dual_ball) {
        trace.dual_ball_violated = true;
        trace.dual_ball_first_violation = k;
      }
    }
  }

  void stamp(IterationRecord& rec) const {
    if (opts_.record_wall_time) {
      rec.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start_)
                          .count();
    }
  }

  const SaddleProblem& p_;
  const StepLengths& steps_;
  const SolverOptions& opts_;
  std::optional<Generator> b0_;
  double b0_prev_ = 0.0;
  double b0_next_cache_ = 0.0;
  std::chrono::steady_clock::time_point start_;
};

void validate_common(const SaddleProblem& p, const StepLengths& steps,
                     const PrimalDual& u0, const SolverOptions& opts) {
  p.check_layouts(u0);
  if (!steps.all_positive())
    throw InvalidArgument("solver: step lengths must be positive");
  if (opts.max_iter < 1) throw InvalidArgument("solver: max_iter >= 1");
  if (opts.tol < 0) throw InvalidArgument("solver: tol >= 0");
  if (opts.monitor_every < 1) throw InvalidArgument("solver: monitor_every >= 1");
}

void finish_ergodic(IterationTrace& trace, const SolverOptions& opts) {
  if (opts.ergodic && !trace.iterates.empty()) {
    PrimalDual erg = trace.iterates[0];
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
      const double w = 1.0 / static_cast<double>(k + 1);
      erg = pd_combine(1.0 - w, erg, w, trace.iterates[k]);
    }
    trace.final_ergodic = std::move(erg);
  }
}

IterationTrace run_affine_driver(const SaddleProblem& p, const StepLengths& steps,
                                 const PrimalDual& u0, const SolverOptions& opts) {
  validate_common(p, steps, u0, opts);
  if (!p.meta.affine_in_y)
    throw InvalidArgument(
        "solve_pdps: coupling is not affine in y; use solve_modified_pdps");
  const std::vector<double> taus = expand(steps.tau, p.f_blocks.size(), "tau");
  const std::vector<double> sigmas =
      expand(steps.sigma, p.gstar_blocks.size(), "sigma");

  IterationTrace trace;
  Monitor monitor(p, steps, opts);
  monitor.baseline(trace, u0);

  PrimalDual u = u0;
  try {
    for (long k = 0; k < opts.max_iter; ++k) {
      // Phase 1: all primal blocks from (x^k, y^k).
      const BlockVector gx = p.coupling.grad_x(u.x, u.y);
      BlockVector xarg(u.x.layout());
      for (std::size_t j = 0; j < taus.size(); ++j) {
        auto xj = u.x.block(j);
        auto gj = gx.block(j);
        auto aj = xarg.block(j);
        for (std::size_t i = 0; i < xj.size(); ++i)
          aj[i] = xj[i] - taus[j] * gj[i];
      }
      BlockVector x1 = p.prox_f(taus, xarg);

      // Phase 2: all dual blocks, over-relaxed in the committed primal.
      const BlockVector gy_old = p.coupling.grad_y(u.x, u.y);
      const BlockVector gy_new = p.coupling.grad_y(x1, u.y);
      BlockVector yarg(u.y.layout());
      for (std::size_t l = 0; l < sigmas.size(); ++l) {
        auto yl = u.y.block(l);
        auto nl = gy_new.block(l);
        auto ol = gy_old.block(l);
        auto al = yarg.block(l);
        for (std::size_t i = 0; i < yl.size(); ++i)
          al[i] = yl[i] + sigmas[l] * (2.0 * nl[i] - ol[i]);
      }
      BlockVector y1 = p.prox_gstar(sigmas, yarg);

      PrimalDual next{std::move(x1), std::move(y1)};
      const bool stop = monitor.after_iteration(trace, k + 1, u, next);
      u = std::move(next);
      trace.iterations = k + 1;
      if (stop) {
        trace.stop_reason = StopReason::Tol;
        break;
      }
      trace.stop_reason = StopReason::MaxIter;
    }
  } catch (const NumericError& e) {
    trace.stop_reason = StopReason::Numeric;
    trace.numeric_error = e.what();
  }
  trace.final_u = std::move(u);
  finish_ergodic(trace, opts);
  return trace;
}

}  // namespace

IterationTrace solve_pdps(const SaddleProblem& p, const StepLengths& steps,
                          const PrimalDual& u0, const SolverOptions& opts) {
  if (steps.tau.size() != 1 || steps.sigma.size() != 1)
    throw InvalidArgument("solve_pdps: single-block steps required");
  return run_affine_driver(p, steps, u0, opts);
}

IterationTrace solve_block_pdps(const SaddleProblem& p, const StepLengths& steps,
                                const PrimalDual& u0, const SolverOptions& opts) {
  return run_affine_driver(p, steps, u0, opts);
}

IterationTrace solve_inertial_pdps(const SaddleProblem& p,
                                   const StepLengths& steps,
                                   const PrimalDual& u0,
                                   const SolverOptions& opts) {
  validate_common(p, steps, u0, opts);
  if (!p.meta.bilinear)
    throw InvalidArgument(
        "solve_inertial_pdps: the shipped inertial variant requires bilinear "
        "coupling");
  if (steps.tau.size() != 1 || steps.sigma.size() != 1)
    throw InvalidArgument("solve_inertial_pdps: single-block steps required");
  if (!opts.uncertified) {
    const Certificate cert = certify_inertia(steps, p.meta.cauchy_beta);
    if (!cert.ok())
      throw CertificateError(
          "solve_inertial_pdps: lambda schedule rejected; pass uncertified to "
          "override\n" +
          cert.to_text());
  }
  const std::vector<double> taus = expand(steps.tau, p.f_blocks.size(), "tau");
  const std::vector<double> sigmas =
      expand(steps.sigma, p.gstar_blocks.size(), "sigma");

  IterationTrace trace;
  Monitor monitor(p, steps, opts);
  monitor.baseline(trace, u0);

  PrimalDual u = u0;
  PrimalDual tilde = u0;
  try {
    for (long k = 0; k < opts.max_iter; ++k) {
      // x^{k+1} = prox_{tau F}(xt^k - tau A* yt^k)
      const BlockVector gx = p.coupling.grad_x(tilde.x, tilde.y);
      BlockVector xarg(u.x.layout());
      for (std::size_t j = 0; j < taus.size(); ++j) {
        auto xj = tilde.x.block(j);
        auto gj = gx.block(j);
        auto aj = xarg.block(j);
        for (std::size_t i = 0; i < xj.size(); ++i)
          aj[i] = xj[i] - taus[j] * gj[i];
      }
      BlockVector x1 = p.prox_f(taus, xarg);

      // y^{k+1} = prox_{sigma G_*}(yt^k + sigma A(2 x^{k+1} - xt^k))
      const BlockVector over = bv_combine(2.0, x1, -1.0, tilde.x);
      const BlockVector gy = p.coupling.grad_y(over, tilde.y);
      BlockVector yarg(u.y.layout());
      for (std::size_t l = 0; l < sigmas.size(); ++l) {
        auto yl = tilde.y.block(l);
        auto gl = gy.block(l);
        auto al = yarg.block(l);
        for (std::size_t i = 0; i < yl.size(); ++i)
          al[i] = yl[i] + sigmas[l] * gl[i];
      }
      BlockVector y1 = p.prox_gstar(sigmas, yarg);

      PrimalDual next{std::move(x1), std::move(y1)};
      const double lam = steps.lambda_at(static_cast<std::size_t>(k) + 1);
      tilde.x = bv_combine(1.0 + lam, next.x, -lam, u.x);
      tilde.y = bv_combine(1.0 + lam, next.y, -lam, u.y);

      const bool stop = monitor.after_iteration(trace, k + 1, u, next);
      u = std::move(next);
      trace.iterations = k + 1;
      if (stop) {
        trace.stop_reason = StopReason::Tol;
        break;
      }
      trace.stop_reason = StopReason::MaxIter;
    }
  } catch (const NumericError& e) {
    trace.stop_reason = StopReason::Numeric;
    trace.numeric_error = e.what();
  }
  trace.final_u = std::move(u);
  finish_ergodic(trace, opts);
  return trace;
}

IterationTrace solve_modified_pdps(const SaddleProblem& p,
                                   const StepLengths& steps,
                                   const PrimalDual& u0,
                                   const SolverOptions& opts) {
  validate_common(p, steps, u0, opts);
  if (steps.tau.size() != 1 || steps.sigma.size() != 1)
    throw InvalidArgument("solve_modified_pdps: single-block steps required");
  if (!opts.uncertified) {
    if (!p.meta.l_dk || !p.meta.l_dk_y)
      throw CertificateError(
          "solve_modified_pdps: problem lacks L_DK/L_DK_y metadata; pass "
          "uncertified to override");
    const Certificate cert =
        certify_modified_k(steps, *p.meta.l_dk, *p.meta.l_dk_y);
    if (!cert.ok())
      throw CertificateError(
          "solve_modified_pdps: steps rejected; pass uncertified to override\n" +
          cert.to_text());
  }
  const std::vector<double> taus = expand(steps.tau, p.f_blocks.size(), "tau");
  const std::vector<double> sigmas =
      expand(steps.sigma, p.gstar_blocks.size(), "sigma");

  IterationTrace trace;
  Monitor monitor(p, steps, opts);
  monitor.baseline(trace, u0);

  PrimalDual u = u0;
  BlockVector y_prev = u0.y;  // y^{-1} = y^0
  try {
    for (long k = 0; k < opts.max_iter; ++k) {
      const BlockVector gx = p.coupling.grad_x(u.x, u.y);
      BlockVector xarg(u.x.layout());
      for (std::size_t j = 0; j < taus.size(); ++j) {
        auto xj = u.x.block(j);
        auto gj = gx.block(j);
        auto aj = xarg.block(j);
        for (std::size_t i = 0; i < xj.size(); ++i)
          aj[i] = xj[i] - taus[j] * gj[i];
      }
      BlockVector x1 = p.prox_f(taus, xarg);

      // Dual step: y^k + sigma [2 D_y K(x^{k+1}, y^k) + D_y K(x^k, y^k)
      //                         - 2 D_y K(x^k, y^{k-1})].
      const BlockVector dy_new = p.coupling.grad_y(x1, u.y);
      const BlockVector dy_cur = p.coupling.grad_y(u.x, u.y);
      const BlockVector dy_old = p.coupling.grad_y(u.x, y_prev);
      BlockVector yarg(u.y.layout());
      for (std::size_t l = 0; l < sigmas.size(); ++l) {
        auto yl = u.y.block(l);
        auto nl = dy_new.block(l);
        auto cl = dy_cur.block(l);
        auto ol = dy_old.block(l);
        auto al = yarg.block(l);
        for (std::size_t i = 0; i < yl.size(); ++i)
          al[i] = yl[i] + sigmas[l] * (2.0 * nl[i] + cl[i] - 2.0 * ol[i]);
      }
      BlockVector y1 = p.prox_gstar(sigmas, yarg);

      y_prev = u.y;
      PrimalDual next{std::move(x1), std::move(y1)};
      const bool stop = monitor.after_iteration(trace, k + 1, u, next);
      u = std::move(next);
      trace.iterations = k + 1;
      if (stop) {
        trace.stop_reason = StopReason::Tol;
        break;
      }
      trace.stop_reason = StopReason::MaxIter;
    }
  } catch (const NumericError& e) {
    trace.stop_reason = StopReason::Numeric;
    trace.numeric_error = e.what();
  }
  trace.final_u = std::move(u);
  finish_ergodic(trace, opts);
  return trace;
}

PrimalDual ergodic_average(const IterationTrace& trace, long upto) {
  if (upto < 1) throw InvalidArgument("ergodic_average: N >= 1");
  if (static_cast<long>(trace.iterates.size()) < upto)
    throw InvalidArgument(
        "ergodic_average: trace stores fewer iterates than requested");
  PrimalDual erg = trace.iterates[0];
  for (long k = 1; k < upto; ++k) {
    const double w = 1.0 / static_cast<double>(k + 1);
    erg = pd_combine(1.0 - w, erg, w, trace.iterates[k]);
  }
  return erg;
}

}  // namespace pdsplit
