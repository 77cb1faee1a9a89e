#include "pdsplit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdsplit/errors.hpp"
#include "pdsplit/grid.hpp"

namespace pdsplit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double block_sq_norm(const BlockVector& a, const BlockVector& b, std::size_t blk) {
  double s = 0.0;
  auto ab = a.block(blk);
  auto bb = b.block(blk);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    const double d = ab[i] - bb[i];
    s += d * d;
  }
  return s;
}
}  // namespace

double lagrangian_value(const SaddleProblem& p, const BlockVector& x,
                        const BlockVector& y) {
  return p.f_value(x) + p.coupling.value(x, y) - p.gstar_value(y);
}

double lagrangian_gap(const SaddleProblem& p, const PrimalDual& u,
                      const PrimalDual& ubar) {
  const double at_u = lagrangian_value(p, u.x, ubar.y);
  const double at_bar = lagrangian_value(p, ubar.x, u.y);
  return at_u - at_bar;
}

double a_k_value(const SaddleProblem& p, const PrimalDual& u,
                 const PrimalDual& ubar) {
  const double k_u = p.coupling.value(u.x, u.y);
  const double k_bar = p.coupling.value(ubar.x, ubar.y);
  const BlockVector dx_u = p.coupling.grad_x(u.x, u.y);
  const BlockVector dy_bar = p.coupling.grad_y(ubar.x, ubar.y);
  return k_u - k_bar + bv_dot(dx_u, bv_combine(1.0, ubar.x, -1.0, u.x)) +
         bv_dot(dy_bar, bv_combine(1.0, ubar.y, -1.0, u.y));
}

double fejer_residual(const SaddleProblem& p, const StepLengths& steps,
                      const PrimalDual& ubar, const PrimalDual& u_k,
                      const PrimalDual& u_k1, double gap_value) {
  const Generator b0 = Generator::saddle_composite(p, steps);
  return bregman_pd(b0, ubar, u_k) - bregman_pd(b0, ubar, u_k1) -
         bregman_pd(b0, u_k1, u_k) - gap_value;
}

GrowthGapValue growth_gap(const SaddleProblem& p, const PrimalDual& u,
                          const PrimalDual& ubar, GrowthMode mode,
                          const GrowthConstants& c) {
  p.check_layouts(u);
  p.check_layouts(ubar);
  const BlockVector dx = bv_combine(1.0, u.x, -1.0, ubar.x);
  const BlockVector dy = bv_combine(1.0, u.y, -1.0, ubar.y);
  const double nx2 = bv_dot(dx, dx);
  const double ny2 = bv_dot(dy, dy);
  GrowthGapValue out;
  switch (mode) {
    case GrowthMode::ConvexConcave:
      out.value = c.gamma_f * nx2 + c.gamma_gstar * ny2;
      out.nonneg_guaranteed = c.gamma_f >= 0 && c.gamma_gstar >= 0;
      break;
    case GrowthMode::LipschitzK:
      out.value = (c.gamma_f - c.l_dk) * nx2 + (c.gamma_gstar - c.l_dk) * ny2;
      out.nonneg_guaranteed = c.gamma_f >= c.l_dk && c.gamma_gstar >= c.l_dk;
      break;
    case GrowthMode::AffineYA: {
      const double gf_tilde = 0.5 * c.l_da * (c.rho_y + norm2(ubar.y));
      out.value = (c.gamma_f - gf_tilde) * nx2 + c.gamma_gstar * ny2;
      out.nonneg_guaranteed = c.gamma_f >= gf_tilde && c.gamma_gstar >= 0;
      break;
    }
    case GrowthMode::AffineYB: {
      if (!(c.alpha > 0)) throw InvalidArgument("growth_gap: alpha must be > 0");
      const double gf_tilde = c.l_da * (norm2(ubar.y) + 0.5 * c.alpha);
      const double gg_tilde = 0.5 * c.l_da / c.alpha * c.rho_x_bar * c.rho_x_bar;
      out.value = (c.gamma_f - gf_tilde) * nx2 + (c.gamma_gstar - gg_tilde) * ny2;
      out.nonneg_guaranteed = c.gamma_f > gf_tilde && c.gamma_gstar >= gg_tilde;
      break;
    }
  }
  return out;
}

DescentReport descent_check(const IterationTrace& trace, const SaddleProblem& p,
                            const StepLengths& steps, const PrimalDual& ubar,
                            std::span<const double> gaps, long N,
                            double b0_coeff, double rhs_scale) {
  if (N < 1) throw InvalidArgument("descent_check: N >= 1");
  if (static_cast<long>(trace.iterates.size()) < N)
    throw InvalidArgument(
        "descent_check: trace must store at least N iterates (run with "
        "ergodic)");
  if (static_cast<long>(gaps.size()) < N)
    throw InvalidArgument("descent_check: need one gap value per iteration");

  const Generator b0 = Generator::saddle_composite(p, steps);
  double sum_steps = 0.0;
  const PrimalDual* prev = &trace.initial_u;
  for (long k = 0; k < N; ++k) {
    sum_steps += bregman_pd(b0, trace.iterates[k], *prev);
    prev = &trace.iterates[k];
  }
  double sum_gaps = 0.0;
  for (long k = 0; k < N; ++k) sum_gaps += gaps[k];

  const double b0_final = bregman_pd(b0, ubar, trace.iterates[N - 1]);
  const double b0_init = bregman_pd(b0, ubar, trace.initial_u);

  DescentReport rep;
  rep.lhs = b0_coeff * b0_final + b0_coeff * sum_steps + sum_gaps;
  rep.rhs = rhs_scale * b0_init;
  const double scale =
      std::max({std::abs(rep.lhs), std::abs(rep.rhs), std::abs(sum_steps)});
  const double tol = 1e-9 + 1e-9 * scale;
  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs + tol;

  // Ergodic consequence at the same N.
  PrimalDual erg = trace.iterates[0];
  for (long k = 1; k < N; ++k) {
    const double w = 1.0 / static_cast<double>(k + 1);
    erg = pd_combine(1.0 - w, erg, w, trace.iterates[k]);
  }
  rep.ergodic_gap = lagrangian_gap(p, erg, ubar);
  rep.ergodic_bound = rhs_scale * b0_init / static_cast<double>(N);
  rep.ergodic_holds = rep.ergodic_gap <= rep.ergodic_bound + tol;
  return rep;
}

double duality_gap_rof(const SaddleProblem& p, const PrimalDual& u,
                       std::span<const double> b, double alpha) {
  if (p.kind != "rof") throw InvalidArgument("duality_gap_rof: not a rof problem");
  GridGradient grad(p.rows, p.cols);
  const std::size_t n = grad.image_size();
  if (b.size() != n) throw LayoutError("duality_gap_rof: image size mismatch");

  auto xe = u.x.entries();
  std::vector<double> g(2 * n);
  grad.apply(xe, g);
  double primal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = xe[i] - b[i];
    primal += 0.5 * d * d;
  }
  for (std::size_t q = 0; q < n; ++q)
    primal += alpha * std::hypot(g[2 * q], g[2 * q + 1]);

  auto ye = u.y.entries();
  const double feas = alpha * (1.0 + 1e-12) + 1e-15;
  for (std::size_t q = 0; q < n; ++q)
    if (std::hypot(ye[2 * q], ye[2 * q + 1]) > feas) return kInf;
  std::vector<double> div(n);
  grad.adjoint(ye, div);
  double dual = 0.0;
  for (std::size_t i = 0; i < n; ++i) dual += div[i] * b[i] - 0.5 * div[i] * div[i];

  return primal - dual;
}

RateFitResult rate_fit(std::span<const std::pair<double, double>> series,
                       RateModel model) {
  if (series.size() < 10)
    throw InvalidArgument("rate_fit: need at least 10 samples");
  for (const auto& [k, v] : series)
    if (!(v > 0)) throw InvalidArgument("rate_fit: values must be positive");

  const std::size_t start = series.size() / 2;  // tail half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  double lo = kInf, hi = -kInf;
  for (std::size_t i = start; i < series.size(); ++i) {
    const double x = model == RateModel::Power ? std::log(series[i].first)
                                               : series[i].first;
    const double y = std::log(series[i].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
    ++m;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0) throw InvalidArgument("rate_fit: degenerate sample positions");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;

  double rss = 0.0;
  for (std::size_t i = start; i < series.size(); ++i) {
    const double x = model == RateModel::Power ? std::log(series[i].first)
                                               : series[i].first;
    const double r = std::log(series[i].second) - (intercept + slope * x);
    rss += r * r;
  }
  RateFitResult out;
  out.coefficient = model == RateModel::Power ? slope : std::exp(slope);
  out.fit_error = std::sqrt(rss / m) / std::max(1.0, hi - lo);
  return out;
}

}  // namespace pdsplit
