#include "pdsplit/step_rules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdsplit/errors.hpp"
#include "pdsplit/rng.hpp"

namespace pdsplit {

StepLengths StepLengths::uniform(double tau_value, double sigma_value,
                                 std::size_t m, std::size_t n) {
  StepLengths s;
  s.tau.assign(m, tau_value);
  s.sigma.assign(n, sigma_value);
  return s;
}

bool StepLengths::all_positive() const {
  for (double t : tau)
    if (!(t > 0)) return false;
  for (double s : sigma)
    if (!(s > 0)) return false;
  return !tau.empty() && !sigma.empty();
}

bool StepLengths::lambda_non_increasing() const {
  for (std::size_t k = 1; k < lambda.size(); ++k)
    if (lambda[k] > lambda[k - 1]) return false;
  return true;
}

std::string Certificate::to_text() const {
  std::ostringstream os;
  os << "certificate " << rule << (local ? " (local)" : "") << "\n";
  for (const auto& [k, v] : inputs) os << "  " << k << " = " << v << "\n";
  os << "  margin = " << margin << "\n";
  os << "  verdict = "
     << (verdict == Verdict::Pass ? "pass"
                                  : verdict == Verdict::Semi ? "semi" : "fail")
     << "\n";
  return os.str();
}

namespace {

Certificate finish(Certificate c, double aggregate) {
  c.margin = 1.0 - aggregate;
  if (c.margin > 0)
    c.verdict = Verdict::Pass;
  else if (c.margin == 0 && !c.strict)
    c.verdict = Verdict::Semi;
  else
    c.verdict = Verdict::Fail;
  return c;
}

void require_single_block(const StepLengths& steps, const char* rule) {
  if (steps.tau.size() != 1 || steps.sigma.size() != 1)
    throw InvalidArgument(std::string(rule) + ": single-block steps required");
}

void require_positive(const StepLengths& steps, const char* rule) {
  if (!steps.all_positive())
    throw InvalidArgument(std::string(rule) + ": steps must be positive");
}

}  // namespace

Certificate certify_lipschitz_k(const StepLengths& steps, double l_dk) {
  require_single_block(steps, "lipschitz_k");
  require_positive(steps, "lipschitz_k");
  Certificate c;
  c.rule = "lipschitz_k";
  c.strict = false;
  c.inputs = {{"tau", steps.tau[0]}, {"sigma", steps.sigma[0]}, {"L_DK", l_dk}};
  return finish(std::move(c), std::max(steps.tau[0], steps.sigma[0]) * l_dk);
}

Certificate certify_bilinear(const StepLengths& steps, double norm_a) {
  require_single_block(steps, "bilinear");
  require_positive(steps, "bilinear");
  Certificate c;
  c.rule = "bilinear";
  c.strict = true;
  c.inputs = {{"tau", steps.tau[0]}, {"sigma", steps.sigma[0]}, {"norm_A", norm_a}};
  return finish(std::move(c), steps.tau[0] * steps.sigma[0] * norm_a * norm_a);
}

Certificate certify_affine_y(const StepLengths& steps, double l_a, double l_da,
                             double rho_y) {
  require_single_block(steps, "affine_y");
  require_positive(steps, "affine_y");
  Certificate c;
  c.rule = "affine_y";
  c.strict = true;
  c.local = true;
  c.inputs = {{"tau", steps.tau[0]},
              {"sigma", steps.sigma[0]},
              {"L_A", l_a},
              {"L_DA", l_da},
              {"rho_y", rho_y}};
  const double agg = steps.tau[0] * steps.sigma[0] * l_a * l_a +
                     steps.tau[0] * l_da * rho_y / 2.0;
  return finish(std::move(c), agg);
}

Certificate certify_combined(const StepLengths& steps, double l_a1,
                             double l_da1, double rho_y1, double norm_a2) {
  require_single_block(steps, "combined");
  require_positive(steps, "combined");
  Certificate c;
  c.rule = "combined";
  c.strict = true;
  c.local = true;
  c.inputs = {{"tau", steps.tau[0]},   {"sigma", steps.sigma[0]},
              {"L_A1", l_a1},          {"L_DA1", l_da1},
              {"rho_y1", rho_y1},      {"norm_A2", norm_a2}};
  const double agg =
      steps.tau[0] * steps.sigma[0] * (l_a1 * l_a1 + norm_a2 * norm_a2) +
      steps.tau[0] * l_da1 * rho_y1 / 2.0;
  return finish(std::move(c), agg);
}

Certificate certify_block_lipschitz(
    const StepLengths& steps, const std::vector<std::vector<double>>& lips,
    double epsilon) {
  require_positive(steps, "block_lipschitz");
  const std::size_t m = steps.tau.size();
  const std::size_t n = steps.sigma.size();
  if (lips.size() != m)
    throw InvalidArgument("block_lipschitz: row count must equal primal blocks");
  for (const auto& row : lips)
    if (row.size() != n)
      throw InvalidArgument("block_lipschitz: column count must equal dual blocks");
  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double s = epsilon;
    for (std::size_t l = 0; l < n; ++l) s += lips[j][l];
    worst = std::max(worst, steps.tau[j] * s);
  }
  for (std::size_t l = 0; l < n; ++l) {
    double s = epsilon;
    for (std::size_t j = 0; j < m; ++j) s += lips[j][l];
    worst = std::max(worst, steps.sigma[l] * s);
  }
  Certificate c;
  c.rule = "block_lipschitz";
  c.strict = false;
  c.inputs = {{"epsilon", epsilon}};
  return finish(std::move(c), worst);
}

namespace {

double block_bilinear_aggregate(const StepLengths& steps,
                                const std::vector<std::vector<double>>& norms,
                                const std::vector<std::vector<double>>& w,
                                double epsilon) {
  const std::size_t m = steps.tau.size();
  const std::size_t n = steps.sigma.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double s = epsilon;
    for (std::size_t l = 0; l < n; ++l) s += w[j][l] * norms[j][l];
    worst = std::max(worst, steps.tau[j] * s);
  }
  for (std::size_t l = 0; l < n; ++l) {
    double s = epsilon;
    for (std::size_t j = 0; j < m; ++j) s += norms[j][l] / w[j][l];
    worst = std::max(worst, steps.sigma[l] * s);
  }
  return worst;
}

}  // namespace

Certificate certify_block_bilinear(
    const StepLengths& steps, const std::vector<std::vector<double>>& norms,
    double epsilon) {
  require_positive(steps, "block_bilinear");
  const std::size_t m = steps.tau.size();
  const std::size_t n = steps.sigma.size();
  if (norms.size() != m)
    throw InvalidArgument("block_bilinear: row count must equal primal blocks");
  for (const auto& row : norms)
    if (row.size() != n)
      throw InvalidArgument("block_bilinear: column count must equal dual blocks");

  // Balancing closed form, then a coordinate-wise local refinement.
  std::vector<std::vector<double>> w(m, std::vector<double>(n, 1.0));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < n; ++l)
      w[j][l] = std::sqrt(steps.sigma[l] / steps.tau[j]);
  double best = block_bilinear_aggregate(steps, norms, w, epsilon);
  const double factors[] = {0.8, 0.9, 0.95, 1.05, 1.1, 1.25};
  for (int pass = 0; pass < 4; ++pass) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t l = 0; l < n; ++l) {
        for (double f : factors) {
          const double saved = w[j][l];
          w[j][l] = saved * f;
          const double agg = block_bilinear_aggregate(steps, norms, w, epsilon);
          if (agg < best)
            best = agg;
          else
            w[j][l] = saved;
        }
      }
    }
  }

  Certificate c;
  c.rule = "block_bilinear";
  c.strict = false;
  c.inputs = {{"epsilon", epsilon}};
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < n; ++l) {
      std::ostringstream key;
      key << "w_" << j + 1 << l + 1;
      c.inputs.emplace_back(key.str(), w[j][l]);
    }
  return finish(std::move(c), best);
}

Certificate certify_two_block(const StepLengths& steps, double l_a1,
                              double l_da1, double rho_y1, double norm_a2) {
  require_positive(steps, "two_block");
  if (steps.tau.size() != 1 || steps.sigma.size() != 2)
    throw InvalidArgument("two_block: one primal and two dual blocks required");
  Certificate c;
  c.rule = "two_block";
  c.strict = true;
  c.local = true;
  c.inputs = {{"tau", steps.tau[0]},   {"sigma1", steps.sigma[0]},
              {"sigma2", steps.sigma[1]}, {"L_A1", l_a1},
              {"L_DA1", l_da1},        {"rho_y1", rho_y1},
              {"norm_A2", norm_a2}};
  const double agg = steps.tau[0] * (steps.sigma[0] * l_a1 * l_a1 +
                                     steps.sigma[1] * norm_a2 * norm_a2) +
                     steps.tau[0] * l_da1 * rho_y1 / 2.0;
  return finish(std::move(c), agg);
}

Certificate certify_inertia(const StepLengths& steps, double beta) {
  if (beta < 0) throw InvalidArgument("inertia: beta must be >= 0");
  Certificate c;
  c.rule = "inertia_lambda";
  c.strict = true;
  c.inputs = {{"beta", beta}};
  if (!steps.lambda.empty()) {
    c.inputs.emplace_back("lambda_0", steps.lambda.front());
    c.inputs.emplace_back("lambda_last", steps.lambda.back());
  }
  if (!steps.lambda_non_increasing()) {
    c.margin = -1.0;
    c.verdict = Verdict::Fail;
    return c;
  }
  for (double l : steps.lambda)
    if (l < 0) {
      c.margin = -1.0;
      c.verdict = Verdict::Fail;
      return c;
    }
  // The schedule is constant past its end, so checking the listed entries
  // plus the constant tail covers all k.
  double worst = 0.0;
  const std::size_t len = std::max<std::size_t>(steps.lambda.size(), 1);
  for (std::size_t k = 0; k < len; ++k)
    worst = std::max(worst,
                     2.0 * steps.lambda_at(k + 1) + beta * steps.lambda_at(k));
  return finish(std::move(c), worst);
}

Certificate certify_modified_k(const StepLengths& steps, double l_dk,
                               double l_dk_y) {
  require_single_block(steps, "modified_k");
  require_positive(steps, "modified_k");
  if (l_dk_y < 0) throw InvalidArgument("modified_k: L_DK_y must be >= 0");
  Certificate c;
  c.rule = "modified_k";
  c.strict = false;
  c.inputs = {{"tau", steps.tau[0]},
              {"sigma", steps.sigma[0]},
              {"L_DK", l_dk},
              {"L_DK_y", l_dk_y}};
  const double root = std::sqrt(l_dk_y);
  const double dual_part = 4.0 * steps.sigma[0] * root;
  if (dual_part >= 1.0) {
    c.margin = 1.0 - dual_part;  // strict sub-rule violated, equality included
    c.verdict = Verdict::Fail;
    return c;
  }
  const double effective_sigma = steps.sigma[0] / (1.0 - dual_part);
  const double agg = l_dk * std::max(steps.tau[0], effective_sigma);
  const double margin = std::min(1.0 - dual_part, 1.0 - agg);
  c.margin = margin;
  if (margin > 0)
    c.verdict = Verdict::Pass;
  else if (margin == 0 && 1.0 - agg == 0.0 && 1.0 - dual_part > 0)
    c.verdict = Verdict::Semi;
  else
    c.verdict = Verdict::Fail;
  return c;
}

double estimate_operator_norm(const LinearMap& apply, const LinearMap& adjoint,
                              std::size_t in_dim, std::size_t out_dim,
                              int iters, std::uint64_t seed) {
  if (in_dim == 0 || out_dim == 0)
    throw InvalidArgument("estimate_operator_norm: empty dimensions");
  if (iters < 1) throw InvalidArgument("estimate_operator_norm: iters >= 1");
  Rng rng(seed);

  // Adjoint consistency on one random pair.
  {
    std::vector<double> x(in_dim), y(out_dim), ax(out_dim), aty(in_dim);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : y) v = rng.uniform(-1.0, 1.0);
    apply(x, ax);
    adjoint(y, aty);
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < out_dim; ++i) lhs += ax[i] * y[i];
    for (std::size_t i = 0; i < in_dim; ++i) rhs += x[i] * aty[i];
    for (std::size_t i = 0; i < out_dim; ++i) scale += std::abs(ax[i] * y[i]);
    if (std::abs(lhs - rhs) > 1e-8 * (1.0 + scale))
      throw InvalidArgument(
          "estimate_operator_norm: apply/adjoint fail the adjoint identity");
  }

  std::vector<double> v(in_dim), av(out_dim), atav(in_dim);
  for (auto& e : v) e = rng.uniform(-1.0, 1.0);
  double norm_v = 0.0;
  for (double e : v) norm_v += e * e;
  norm_v = std::sqrt(norm_v);
  if (norm_v == 0) v[0] = 1.0, norm_v = 1.0;
  for (auto& e : v) e /= norm_v;

  double rayleigh = 0.0;
  for (int it = 0; it < iters; ++it) {
    apply(v, av);
    adjoint(av, atav);
    rayleigh = 0.0;
    for (std::size_t i = 0; i < in_dim; ++i) rayleigh += v[i] * atav[i];
    double n = 0.0;
    for (double e : atav) n += e * e;
    n = std::sqrt(n);
    if (n == 0) return 0.0;  // v in the kernel of A*A
    for (std::size_t i = 0; i < in_dim; ++i) v[i] = atav[i] / n;
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

}  // namespace pdsplit
