#include "pdsplit/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ProxFunction ProxFunction::quadratic_data(std::vector<double> b) {
  return ProxFunction(ProxKind::QuadraticData, std::move(b), 0.0, 1.0);
}

ProxFunction ProxFunction::scaled_l1(double alpha) {
  if (alpha < 0) throw InvalidArgument("scaled_l1: alpha must be >= 0");
  return ProxFunction(ProxKind::ScaledL1, {}, alpha, 0.0);
}

ProxFunction ProxFunction::ball2_pointwise(double alpha) {
  if (alpha < 0) throw InvalidArgument("ball2_pointwise: alpha must be >= 0");
  return ProxFunction(ProxKind::Ball2Pointwise, {}, alpha, 0.0);
}

ProxFunction ProxFunction::indicator_zero() {
  return ProxFunction(ProxKind::IndicatorZero, {}, 0.0, 0.0);
}

ProxFunction ProxFunction::zero() {
  return ProxFunction(ProxKind::Zero, {}, 0.0, 0.0);
}

double ProxFunction::value(std::span<const double> x) const {
  switch (kind_) {
    case ProxKind::QuadraticData: {
      if (x.size() != b_.size())
        throw LayoutError("ProxFunction: reference length mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - b_[i];
        s += 0.5 * d * d;
      }
      return s;
    }
    case ProxKind::ScaledL1: {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return alpha_ * s;
    }
    case ProxKind::Ball2Pointwise: {
      if (x.size() % 2 != 0)
        throw LayoutError("ball2_pointwise: block length must be even");
      // Tiny feasibility slack absorbs rounding in projected iterates.
      const double r = alpha_ * (1.0 + 1e-12) + 1e-15;
      for (std::size_t p = 0; p < x.size() / 2; ++p) {
        const double n = std::hypot(x[2 * p], x[2 * p + 1]);
        if (n > r) return kInf;
      }
      return 0.0;
    }
    case ProxKind::IndicatorZero: {
      for (double v : x)
        if (std::abs(v) > 1e-14) return kInf;
      return 0.0;
    }
    case ProxKind::Zero:
      return 0.0;
  }
  return 0.0;
}

void ProxFunction::prox(double tau, std::span<const double> x,
                        std::span<double> out) const {
  if (tau <= 0) throw InvalidArgument("prox: tau must be > 0");
  if (out.size() != x.size()) throw LayoutError("prox: output size mismatch");
  switch (kind_) {
    case ProxKind::QuadraticData: {
      if (x.size() != b_.size())
        throw LayoutError("ProxFunction: reference length mismatch");
      // (x + tau b)/(1 + tau) rewritten about b: exact at the fixed point.
      const double inv = 1.0 / (1.0 + tau);
      for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = b_[i] + (x[i] - b_[i]) * inv;
      break;
    }
    case ProxKind::ScaledL1: {
      const double t = tau * alpha_;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = std::abs(x[i]) - t;
        out[i] = m > 0 ? (x[i] > 0 ? m : -m) : 0.0;
      }
      break;
    }
    case ProxKind::Ball2Pointwise: {
      if (x.size() % 2 != 0)
        throw LayoutError("ball2_pointwise: block length must be even");
      for (std::size_t p = 0; p < x.size() / 2; ++p) {
        const double a = x[2 * p];
        const double b = x[2 * p + 1];
        const double n = std::hypot(a, b);
        if (n > alpha_) {
          const double s = alpha_ / n;
          out[2 * p] = a * s;
          out[2 * p + 1] = b * s;
        } else {
          out[2 * p] = a;
          out[2 * p + 1] = b;
        }
      }
      break;
    }
    case ProxKind::IndicatorZero:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.0;
      break;
    case ProxKind::Zero:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
      break;
  }
}

BlockVector prox_apply(const ProxFunction& f, double tau, const BlockVector& x) {
  BlockVector out(x.layout());
  f.prox(tau, x.entries(), out.entries());
  return out;
}

namespace {

// Golden-section search on [a, b], robust to +infinity plateaus: the best
// point ever evaluated is tracked and returned.
double golden_refine(const std::function<double(double)>& phi, double a,
                     double b, double tol, double best_w, double best_v) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = phi(c);
  double fd = phi(d);
  auto consider = [&](double w, double v) {
    if (v < best_v) {
      best_v = v;
      best_w = w;
    }
  };
  consider(c, fc);
  consider(d, fd);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = phi(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = phi(d);
      consider(d, fd);
    }
  }
  return best_w;
}

}  // namespace

std::vector<double> prox_oracle(
    const std::function<double(std::size_t, double)>& f_value, double tau,
    std::span<const double> x, double lo, double hi, double tol) {
  if (hi <= lo) throw InvalidArgument("prox_oracle: need hi > lo");
  if (tol <= 0) throw InvalidArgument("prox_oracle: need tol > 0");
  const int grid_n = 1000;
  const double step = (hi - lo) / grid_n;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto phi = [&](double w) {
      const double fv = f_value(i, w);
      return tau * fv + 0.5 * (w - x[i]) * (w - x[i]);
    };
    double best_w = lo;
    double best_v = phi(lo);
    for (int g = 1; g <= grid_n; ++g) {
      const double w = (g == grid_n) ? hi : lo + g * step;
      const double v = phi(w);
      if (v < best_v) {
        best_v = v;
        best_w = w;
      }
    }
    const double a = std::max(lo, best_w - step);
    const double b = std::min(hi, best_w + step);
    out[i] = golden_refine(phi, a, b, tol, best_w, best_v);
  }
  return out;
}

}  // namespace pdsplit
