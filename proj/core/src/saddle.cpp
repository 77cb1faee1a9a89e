#include "pdsplit/saddle.hpp"

#include <algorithm>
#include <cmath>

#include "pdsplit/errors.hpp"

namespace pdsplit {

double SaddleProblem::f_value(const BlockVector& x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < f_blocks.size(); ++j) s += f_blocks[j].value(x.block(j));
  return s;
}

double SaddleProblem::gstar_value(const BlockVector& y) const {
  double s = 0.0;
  for (std::size_t l = 0; l < gstar_blocks.size(); ++l)
    s += gstar_blocks[l].value(y.block(l));
  return s;
}

BlockVector SaddleProblem::prox_f(std::span<const double> taus,
                                  const BlockVector& v) const {
  if (taus.size() != f_blocks.size())
    throw LayoutError("prox_f: one step per primal block required");
  BlockVector out(v.layout());
  for (std::size_t j = 0; j < f_blocks.size(); ++j)
    f_blocks[j].prox(taus[j], v.block(j), out.block(j));
  return out;
}

BlockVector SaddleProblem::prox_gstar(std::span<const double> sigmas,
                                      const BlockVector& v) const {
  if (sigmas.size() != gstar_blocks.size())
    throw LayoutError("prox_gstar: one step per dual block required");
  BlockVector out(v.layout());
  for (std::size_t l = 0; l < gstar_blocks.size(); ++l)
    gstar_blocks[l].prox(sigmas[l], v.block(l), out.block(l));
  return out;
}

void SaddleProblem::check_layouts(const PrimalDual& u) const {
  if (u.x.layout() != primal_layout || u.y.layout() != dual_layout)
    throw LayoutError("saddle: iterate layout does not match the problem");
}

CouplingEval coupling_eval(const SaddleProblem& p, const PrimalDual& u) {
  p.check_layouts(u);
  CouplingEval out;
  out.k = p.coupling.value(u.x, u.y);
  if (!std::isfinite(out.k)) throw NumericError("coupling_eval: K(u) non-finite");
  out.dx = p.coupling.grad_x(u.x, u.y);
  if (!out.dx.all_finite())
    throw NumericError("coupling_eval: D_x K(u) non-finite");
  out.dy = p.coupling.grad_y(u.x, u.y);
  if (!out.dy.all_finite())
    throw NumericError("coupling_eval: D_y K(u) non-finite");
  if (p.meta.region && !p.meta.region->contains(u)) out.in_region = false;
  return out;
}

double optimality_residual(const SaddleProblem& p, const StepLengths& steps,
                           const PrimalDual& u) {
  if (!steps.all_positive())
    throw InvalidArgument("optimality_residual: steps must be positive");
  p.check_layouts(u);
  auto expand = [](const std::vector<double>& v, std::size_t blocks,
                   const char* what) {
    if (v.size() == blocks) return v;
    if (v.size() == 1) return std::vector<double>(blocks, v[0]);
    throw InvalidArgument(std::string("optimality_residual: ") + what +
                          " count does not match the block structure");
  };
  const std::vector<double> taus = expand(steps.tau, p.f_blocks.size(), "tau");
  const std::vector<double> sigmas =
      expand(steps.sigma, p.gstar_blocks.size(), "sigma");

  const BlockVector dx = p.coupling.grad_x(u.x, u.y);
  const BlockVector dy = p.coupling.grad_y(u.x, u.y);
  BlockVector xarg(u.x.layout());
  for (std::size_t j = 0; j < p.f_blocks.size(); ++j) {
    auto xj = u.x.block(j);
    auto dj = dx.block(j);
    auto aj = xarg.block(j);
    for (std::size_t i = 0; i < xj.size(); ++i) aj[i] = xj[i] - taus[j] * dj[i];
  }
  const BlockVector x1 = p.prox_f(taus, xarg);
  // With both extrapolation points at u the dual argument reduces to
  // y + sigma * D_y K(u).
  BlockVector yarg(u.y.layout());
  for (std::size_t l = 0; l < p.gstar_blocks.size(); ++l) {
    auto yl = u.y.block(l);
    auto dl = dy.block(l);
    auto al = yarg.block(l);
    for (std::size_t i = 0; i < yl.size(); ++i) al[i] = yl[i] + sigmas[l] * dl[i];
  }
  const BlockVector y1 = p.prox_gstar(sigmas, yarg);
  const BlockVector ex = bv_combine(1.0, u.x, -1.0, x1);
  const BlockVector ey = bv_combine(1.0, u.y, -1.0, y1);
  return std::sqrt(bv_dot(ex, ex) + bv_dot(ey, ey));
}

namespace {

double rho(double t) { return 2.0 * t - t * t; }
double rho_prime(double t) { return 2.0 - 2.0 * t; }

SaddleProblem make_rof(const ProblemParams& params) {
  if (params.rows == 0 || params.cols == 0 || params.image.size() != params.rows * params.cols)
    throw InvalidArgument("rof: rows, cols, and a matching image are required");
  const std::size_t n = params.rows * params.cols;
  GridGradient grad(params.rows, params.cols);

  SaddleProblem p;
  p.kind = "rof";
  p.rows = params.rows;
  p.cols = params.cols;
  p.alpha = params.alpha;
  p.data_image = params.image;
  p.primal_layout = {n};
  p.dual_layout = {2 * n};
  p.f_blocks = {ProxFunction::quadratic_data(params.image)};
  p.gstar_blocks = {ProxFunction::ball2_pointwise(params.alpha)};
  p.coupling.value = [grad](const BlockVector& x, const BlockVector& y) {
    return bv_dot(grad.apply(x), y);
  };
  p.coupling.grad_x = [grad](const BlockVector&, const BlockVector& y) {
    return grad.adjoint(y);
  };
  p.coupling.grad_y = [grad](const BlockVector& x, const BlockVector&) {
    return grad.apply(x);
  };

  const double norm_a = estimate_operator_norm(
      [grad](std::span<const double> in, std::span<double> out) {
        grad.apply(in, out);
      },
      [grad](std::span<const double> in, std::span<double> out) {
        grad.adjoint(in, out);
      },
      n, 2 * n, params.norm_iters, params.norm_seed);

  p.meta.affine_in_y = true;
  p.meta.bilinear = true;
  p.meta.cauchy_beta = 1.0;
  p.meta.norm_a = norm_a;
  p.meta.l_a = norm_a;
  p.meta.l_da = 0.0;
  p.meta.l_dk = norm_a;
  p.meta.l_dk_y = 0.0;
  return p;
}

SaddleProblem make_two_block(const ProblemParams& params) {
  if (params.rows == 0 || params.cols == 0 || params.image.size() != params.rows * params.cols)
    throw InvalidArgument("two_block: rows, cols, and a matching image are required");
  const std::size_t n = params.rows * params.cols;
  GridGradient grad(params.rows, params.cols);
  std::vector<double> target = params.target1;
  if (target.empty()) {
    target.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      target[i] = 0.5 * params.image[i] * params.image[i];
  }
  if (target.size() != n)
    throw InvalidArgument("two_block: target1 must match the image size");

  SaddleProblem p;
  p.kind = "two_block";
  p.rows = params.rows;
  p.cols = params.cols;
  p.alpha = params.alpha;
  p.data_image = params.image;
  p.primal_layout = {n};
  p.dual_layout = {n, 2 * n};
  if (params.f_kind == "zero")
    p.f_blocks = {ProxFunction::zero()};
  else
    p.f_blocks = {ProxFunction::quadratic_data(params.image)};
  // G1(v) = ||v - c||^2/2 has conjugate ||y + c||^2/2 up to a constant,
  // which cancels in every gap difference.
  std::vector<double> neg_target(n);
  for (std::size_t i = 0; i < n; ++i) neg_target[i] = -target[i];
  p.gstar_blocks = {ProxFunction::quadratic_data(neg_target),
                    ProxFunction::ball2_pointwise(params.alpha)};

  p.coupling.value = [grad, n](const BlockVector& x, const BlockVector& y) {
    double s = 0.0;
    auto xe = x.entries();
    auto y1 = y.block(0);
    for (std::size_t i = 0; i < n; ++i) s += 0.5 * xe[i] * xe[i] * y1[i];
    std::vector<double> g(2 * n);
    grad.apply(xe, g);
    auto y2 = y.block(1);
    for (std::size_t i = 0; i < 2 * n; ++i) s += g[i] * y2[i];
    return s;
  };
  p.coupling.grad_x = [grad, n](const BlockVector& x, const BlockVector& y) {
    BlockVector out(std::vector<std::size_t>{n});
    grad.adjoint(y.block(1), out.entries());
    auto xe = x.entries();
    auto y1 = y.block(0);
    auto oe = out.entries();
    for (std::size_t i = 0; i < n; ++i) oe[i] += xe[i] * y1[i];
    return out;
  };
  p.coupling.grad_y = [grad, n](const BlockVector& x, const BlockVector&) {
    BlockVector out(std::vector<std::size_t>{n, 2 * n});
    auto xe = x.entries();
    auto o1 = out.block(0);
    for (std::size_t i = 0; i < n; ++i) o1[i] = 0.5 * xe[i] * xe[i];
    grad.apply(xe, out.block(1));
    return out;
  };

  const double norm_a2 = estimate_operator_norm(
      [grad](std::span<const double> in, std::span<double> out) {
        grad.apply(in, out);
      },
      [grad](std::span<const double> in, std::span<double> out) {
        grad.adjoint(in, out);
      },
      n, 2 * n, params.norm_iters, params.norm_seed);

  const double box = params.omega_x;
  const double rho1 = params.omega_y;
  p.meta.affine_in_y = true;
  p.meta.bilinear = false;
  p.meta.l_a1 = box;   // sup of ||DA1(x)|| = ||x||_inf on the box
  p.meta.l_da1 = 1.0;  // DA1(x) = diag(x) is 1-Lipschitz globally
  p.meta.norm_a2 = norm_a2;
  p.meta.rho_y1 = rho1;
  p.meta.l_dk_y = 0.0;
  p.meta.local = true;
  p.meta.region = Region{
      "|x_i| <= omega_x and ||y1|| <= omega_y",
      [box, rho1](const PrimalDual& u) {
        for (double v : u.x.entries())
          if (std::abs(v) > box) return false;
        double s = 0.0;
        for (double v : u.y.block(0)) s += v * v;
        return std::sqrt(s) <= rho1;
      }};
  return p;
}

SaddleProblem make_potts(const ProblemParams& params) {
  if (params.rows == 0 || params.cols == 0 || params.image.size() != params.rows * params.cols)
    throw InvalidArgument("potts: rows, cols, and a matching image are required");
  const std::size_t n = params.rows * params.cols;
  GridGradient grad(params.rows, params.cols);

  SaddleProblem p;
  p.kind = "potts";
  p.rows = params.rows;
  p.cols = params.cols;
  p.data_image = params.image;
  p.primal_layout = {n};
  p.dual_layout = {2 * n};
  p.f_blocks = {ProxFunction::quadratic_data(params.image)};
  // Opt-in: introduce the dual bound into the problem instead of monitoring.
  if (params.project_dual_ball)
    p.gstar_blocks = {ProxFunction::ball2_pointwise(params.omega_y)};
  else
    p.gstar_blocks = {ProxFunction::zero()};

  p.coupling.value = [grad, n](const BlockVector& x, const BlockVector& y) {
    std::vector<double> g(2 * n);
    grad.apply(x.entries(), g);
    auto ye = y.entries();
    double s = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const double t = g[2 * q] * ye[2 * q] + g[2 * q + 1] * ye[2 * q + 1];
      s += rho(t);
    }
    return s;
  };
  p.coupling.grad_x = [grad, n](const BlockVector& x, const BlockVector& y) {
    std::vector<double> g(2 * n);
    grad.apply(x.entries(), g);
    auto ye = y.entries();
    std::vector<double> w(2 * n);
    for (std::size_t q = 0; q < n; ++q) {
      const double t = g[2 * q] * ye[2 * q] + g[2 * q + 1] * ye[2 * q + 1];
      const double rp = rho_prime(t);
      w[2 * q] = rp * ye[2 * q];
      w[2 * q + 1] = rp * ye[2 * q + 1];
    }
    BlockVector out(std::vector<std::size_t>{n});
    grad.adjoint(w, out.entries());
    return out;
  };
  p.coupling.grad_y = [grad, n](const BlockVector& x, const BlockVector& y) {
    std::vector<double> g(2 * n);
    grad.apply(x.entries(), g);
    auto ye = y.entries();
    BlockVector out(std::vector<std::size_t>{2 * n});
    auto oe = out.entries();
    for (std::size_t q = 0; q < n; ++q) {
      const double t = g[2 * q] * ye[2 * q] + g[2 * q + 1] * ye[2 * q + 1];
      const double rp = rho_prime(t);
      oe[2 * q] = rp * g[2 * q];
      oe[2 * q + 1] = rp * g[2 * q + 1];
    }
    return out;
  };

  // Local Lipschitz bounds on the box |x_i| <= X, ||y_p|| <= Y from symbolic
  // bounds of the polynomial derivatives: per pixel |g_p| <= 2*sqrt(2)*X,
  // |t_p| <= |g_p| Y, |rho'| <= 2 + 2|t|, |rho''| = 2, ||grad_h|| <= sqrt(8).
  const double X = params.omega_x;
  const double Y = params.omega_y;
  const double gmax = 2.0 * std::sqrt(2.0) * X;
  const double tmax = gmax * Y;
  const double p1 = 2.0 + 2.0 * tmax;
  const double norm_grad = std::sqrt(8.0);
  const double h_xx = norm_grad * norm_grad * 2.0 * Y * Y;
  const double h_yy = 2.0 * gmax * gmax;
  const double h_xy = norm_grad * (2.0 * Y * gmax + p1);
  p.meta.affine_in_y = false;
  p.meta.bilinear = false;
  p.meta.l_dk = std::max(h_xx, h_yy) + h_xy;
  p.meta.l_dk_y = 2.0 * gmax * gmax;
  p.meta.local = true;
  p.meta.region = Region{
      "|x_i| <= omega_x and per-pixel ||y_p|| <= omega_y",
      [X, Y](const PrimalDual& u) {
        for (double v : u.x.entries())
          if (std::abs(v) > X) return false;
        auto ye = u.y.entries();
        for (std::size_t q = 0; q < ye.size() / 2; ++q)
          if (std::hypot(ye[2 * q], ye[2 * q + 1]) > Y) return false;
        return true;
      }};
  return p;
}

SaddleProblem make_fb(const ProblemParams& params) {
  if (params.quad_diag.empty())
    throw InvalidArgument("fb: quad_diag is required");
  const std::size_t n = params.quad_diag.size();
  std::vector<double> c = params.lin_coef;
  if (c.empty()) c.assign(n, 0.0);
  if (c.size() != n) throw InvalidArgument("fb: lin_coef size mismatch");
  std::vector<double> q = params.quad_diag;

  SaddleProblem p;
  p.kind = "fb";
  p.primal_layout = {n};
  p.dual_layout = {1};
  if (params.f_kind == "l1")
    p.f_blocks = {ProxFunction::scaled_l1(params.alpha)};
  else if (params.f_kind == "zero")
    p.f_blocks = {ProxFunction::zero()};
  else {
    std::vector<double> b = params.image;
    if (b.empty()) b.assign(n, 0.0);
    if (b.size() != n) throw InvalidArgument("fb: image size mismatch");
    p.f_blocks = {ProxFunction::quadratic_data(b)};
  }
  p.gstar_blocks = {ProxFunction::indicator_zero()};

  p.coupling.value = [q, c](const BlockVector& x, const BlockVector&) {
    double s = 0.0;
    auto xe = x.entries();
    for (std::size_t i = 0; i < xe.size(); ++i)
      s += 0.5 * q[i] * xe[i] * xe[i] - c[i] * xe[i];
    return s;
  };
  p.coupling.grad_x = [q, c](const BlockVector& x, const BlockVector&) {
    BlockVector out(x.layout());
    auto xe = x.entries();
    auto oe = out.entries();
    for (std::size_t i = 0; i < xe.size(); ++i) oe[i] = q[i] * xe[i] - c[i];
    return out;
  };
  p.coupling.grad_y = [](const BlockVector&, const BlockVector& y) {
    return BlockVector(y.layout());
  };

  double l = 0.0;
  for (double v : q) l = std::max(l, std::abs(v));
  p.meta.affine_in_y = true;
  p.meta.bilinear = false;
  p.meta.l_dk = l;
  p.meta.l_dk_y = 0.0;
  return p;
}

}  // namespace

SaddleProblem make_problem(const std::string& name, const ProblemParams& params) {
  if (name == "rof") return make_rof(params);
  if (name == "two_block") return make_two_block(params);
  if (name == "potts") return make_potts(params);
  if (name == "fb") return make_fb(params);
  throw InvalidArgument("make_problem: unknown problem \"" + name + "\"");
}

double potts_zero_function_check(double t, double s_bound, double s_step) {
  double best = 0.0;  // grid always contains s = 0 where rho(st) = 0
  for (double s = -s_bound; s <= s_bound; s += s_step) {
    const double v = rho(s * t);
    if (v > best) best = v;
  }
  return best;
}

}  // namespace pdsplit
