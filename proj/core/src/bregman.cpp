#include "pdsplit/bregman.hpp"

#include <cmath>

#include "pdsplit/errors.hpp"
#include "pdsplit/rng.hpp"

namespace pdsplit {

Generator Generator::quadratic(std::vector<std::size_t> layout,
                               std::vector<double> weights) {
  if (layout.size() != weights.size())
    throw InvalidArgument("Generator::quadratic: one weight per block");
  for (double w : weights)
    if (!(w > 0)) throw InvalidArgument("Generator::quadratic: weights > 0");
  Generator g;
  g.kind_ = Kind::Quadratic;
  g.layout_ = std::move(layout);
  g.weights_ = std::move(weights);
  return g;
}

Generator Generator::saddle_composite(const SaddleProblem& p,
                                      const StepLengths& steps) {
  if (steps.tau.size() != p.primal_layout.size() ||
      steps.sigma.size() != p.dual_layout.size())
    throw InvalidArgument(
        "Generator::saddle_composite: steps must match the block structure");
  if (!steps.all_positive())
    throw InvalidArgument("Generator::saddle_composite: steps must be positive");
  Generator g;
  g.kind_ = Kind::SaddleComposite;
  g.layout_ = p.primal_layout;
  g.layout_.insert(g.layout_.end(), p.dual_layout.begin(), p.dual_layout.end());
  for (double t : steps.tau) g.weights_.push_back(1.0 / t);
  for (double s : steps.sigma) g.weights_.push_back(1.0 / s);
  g.problem_ = std::make_shared<SaddleProblem>(p);
  g.primal_blocks_ = p.primal_layout.size();
  return g;
}

Generator Generator::custom(
    std::vector<std::size_t> layout,
    std::function<double(const BlockVector&)> value,
    std::function<BlockVector(const BlockVector&)> derivative) {
  Generator g;
  g.kind_ = Kind::Custom;
  g.layout_ = std::move(layout);
  g.value_fn_ = std::move(value);
  g.deriv_fn_ = std::move(derivative);
  return g;
}

double Generator::value(const BlockVector& v) const {
  if (v.layout() != layout_) throw LayoutError("Generator::value: layout mismatch");
  switch (kind_) {
    case Kind::Custom:
      return value_fn_(v);
    case Kind::Quadratic:
    case Kind::SaddleComposite: {
      double s = 0.0;
      for (std::size_t b = 0; b < layout_.size(); ++b) {
        double q = 0.0;
        for (double e : v.block(b)) q += e * e;
        s += 0.5 * weights_[b] * q;
      }
      if (kind_ == Kind::SaddleComposite) {
        const PrimalDual u = pd_split(v, primal_blocks_);
        s -= problem_->coupling.value(u.x, u.y);
      }
      return s;
    }
  }
  return 0.0;
}

BlockVector Generator::derivative(const BlockVector& v) const {
  if (v.layout() != layout_)
    throw LayoutError("Generator::derivative: layout mismatch");
  switch (kind_) {
    case Kind::Custom:
      return deriv_fn_(v);
    case Kind::Quadratic:
    case Kind::SaddleComposite: {
      BlockVector out(layout_);
      for (std::size_t b = 0; b < layout_.size(); ++b) {
        auto vb = v.block(b);
        auto ob = out.block(b);
        for (std::size_t i = 0; i < vb.size(); ++i) ob[i] = weights_[b] * vb[i];
      }
      if (kind_ == Kind::SaddleComposite) {
        const PrimalDual u = pd_split(v, primal_blocks_);
        const BlockVector dx = problem_->coupling.grad_x(u.x, u.y);
        const BlockVector dy = problem_->coupling.grad_y(u.x, u.y);
        const BlockVector dk = pd_concat({dx, dy});
        auto oe = out.entries();
        auto de = dk.entries();
        for (std::size_t i = 0; i < oe.size(); ++i) oe[i] -= de[i];
      }
      return out;
    }
  }
  return BlockVector(layout_);
}

double Generator::coupling_divergence(const BlockVector& z,
                                      const BlockVector& x) const {
  if (kind_ != Kind::SaddleComposite) return 0.0;
  const PrimalDual zu = pd_split(z, primal_blocks_);
  const PrimalDual xu = pd_split(x, primal_blocks_);
  const double kz = problem_->coupling.value(zu.x, zu.y);
  const double kx = problem_->coupling.value(xu.x, xu.y);
  const BlockVector dx = problem_->coupling.grad_x(xu.x, xu.y);
  const BlockVector dy = problem_->coupling.grad_y(xu.x, xu.y);
  double inner = 0.0;
  inner += bv_dot(dx, bv_combine(1.0, zu.x, -1.0, xu.x));
  inner += bv_dot(dy, bv_combine(1.0, zu.y, -1.0, xu.y));
  return kz - kx - inner;
}

DivergenceValue bregman_value(const Generator& J, const BlockVector& z,
                              const BlockVector& x) {
  if (!z.same_layout(x)) throw LayoutError("bregman_value: layout mismatch");
  DivergenceValue out;
  out.grad1 = bv_combine(1.0, J.derivative(z), -1.0, J.derivative(x));
  const std::vector<double>& w = J.block_weights();
  if (!w.empty()) {
    // Quadratic part evaluated on differences: identical algebra to the
    // defining formula, free of large-term cancellation.
    const BlockVector d = bv_combine(1.0, z, -1.0, x);
    double s = 0.0;
    for (std::size_t b = 0; b < d.block_count(); ++b) {
      double q = 0.0;
      for (double e : d.block(b)) q += e * e;
      s += 0.5 * w[b] * q;
    }
    if (J.has_coupling()) s -= J.coupling_divergence(z, x);
    out.value = s;
  } else {
    const BlockVector d = bv_combine(1.0, z, -1.0, x);
    out.value = J.value(z) - J.value(x) - bv_dot(J.derivative(x), d);
  }
  if (!std::isfinite(out.value))
    throw NumericError("bregman_value: non-finite result");
  return out;
}

double bregman_pd(const Generator& J, const PrimalDual& z, const PrimalDual& x) {
  return bregman_value(J, pd_concat(z), pd_concat(x)).value;
}

double three_point_residual(const Generator& J, const BlockVector& x,
                            const BlockVector& z, const BlockVector& xbar) {
  if (!x.same_layout(z) || !x.same_layout(xbar))
    throw LayoutError("three_point_residual: layout mismatch");
  const BlockVector djx = J.derivative(x);
  const BlockVector djz = J.derivative(z);
  const double lhs = bv_dot(bv_combine(1.0, djx, -1.0, djz),
                            bv_combine(1.0, x, -1.0, xbar));
  const double rhs = bregman_value(J, xbar, x).value -
                     bregman_value(J, xbar, z).value +
                     bregman_value(J, x, z).value;
  return lhs - rhs;
}

SampleRegion SampleRegion::box(double lo, double hi) {
  SampleRegion r;
  r.kind = Kind::Box;
  r.lo = lo;
  r.hi = hi;
  return r;
}

SampleRegion SampleRegion::ball(BlockVector center, double radius) {
  SampleRegion r;
  r.kind = Kind::Ball;
  r.center = std::move(center);
  r.radius = radius;
  return r;
}

namespace {

BlockVector sample_point(const SampleRegion& region,
                         const std::vector<std::size_t>& layout, Rng& rng) {
  BlockVector v(layout);
  auto e = v.entries();
  if (region.kind == SampleRegion::Kind::Box) {
    for (std::size_t i = 0; i < e.size(); ++i)
      e[i] = rng.uniform(region.lo, region.hi);
  } else {
    double n2 = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      e[i] = rng.normal();
      n2 += e[i] * e[i];
    }
    const double n = std::sqrt(n2);
    const double r =
        region.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(e.size()));
    auto c = region.center.entries();
    for (std::size_t i = 0; i < e.size(); ++i)
      e[i] = c[i] + (n > 0 ? r * e[i] / n : 0.0);
  }
  return v;
}

}  // namespace

ProbeReport ellipticity_probe(const Generator& J, const SampleRegion& region,
                              double gamma, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw InvalidArgument("ellipticity_probe: n_samples >= 1");
  if (region.kind == SampleRegion::Kind::Box && !(region.hi > region.lo))
    throw InvalidArgument("ellipticity_probe: empty box region");
  if (region.kind == SampleRegion::Kind::Ball && !(region.radius > 0))
    throw InvalidArgument("ellipticity_probe: empty ball region");
  if (gamma < 0) throw InvalidArgument("ellipticity_probe: gamma >= 0");
  Rng rng(seed);
  ProbeReport report;
  bool first = true;
  for (int s = 0; s < n_samples; ++s) {
    BlockVector z = sample_point(region, J.layout(), rng);
    BlockVector x = sample_point(region, J.layout(), rng);
    const BlockVector d = bv_combine(1.0, z, -1.0, x);
    const double margin =
        bregman_value(J, z, x).value - 0.5 * gamma * bv_dot(d, d);
    if (first || margin < report.min_margin) {
      report.min_margin = margin;
      report.witness_z = std::move(z);
      report.witness_x = std::move(x);
      first = false;
    }
  }
  return report;
}

CauchyReport cauchy_bound_check(const Generator& J, const BlockVector& x,
                                const BlockVector& y, const BlockVector& z,
                                double alpha, double gamma, double L) {
  if (!(alpha > 0) || !(gamma > 0) || !(L > 0))
    throw InvalidArgument("cauchy_bound_check: alpha, gamma, L must be > 0");
  const BlockVector d1 = bv_combine(1.0, J.derivative(x), -1.0, J.derivative(y));
  CauchyReport r;
  r.lhs = std::abs(bv_dot(d1, bv_combine(1.0, z, -1.0, x)));
  r.rhs = (L / alpha) * bregman_value(J, x, y).value +
          (alpha / gamma) * bregman_value(J, z, x).value;
  r.holds = r.lhs <= r.rhs + 1e-12;
  return r;
}

}  // namespace pdsplit
