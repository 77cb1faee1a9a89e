#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pdsplit {

// Per-block primal/dual step lengths plus an optional inertia schedule.
// An empty lambda schedule means no inertia; a non-empty one is read as
// lambda_k for k < size and as its last value afterwards.
struct StepLengths {
  std::vector<double> tau;
  std::vector<double> sigma;
  std::vector<double> lambda;

  static StepLengths uniform(double tau_value, double sigma_value,
                             std::size_t m = 1, std::size_t n = 1);

  double lambda_at(std::size_t k) const {
    if (lambda.empty()) return 0.0;
    return k < lambda.size() ? lambda[k] : lambda.back();
  }

  bool all_positive() const;
  bool lambda_non_increasing() const;
};

enum class Verdict { Pass, Semi, Fail };

// Outcome of one executable step-length rule. margin > 0 means the rule's
// aggregate stays strictly below its bound; margin == 0 is the boundary,
// allowed only by rules with strict == false (verdict Semi).
struct Certificate {
  std::string rule;
  std::vector<std::pair<std::string, double>> inputs;
  double margin = 0.0;
  bool strict = true;
  Verdict verdict = Verdict::Fail;
  bool local = false;  // constants valid only on a declared region

  bool ok() const { return verdict != Verdict::Fail; }
  std::string to_text() const;
};

// 1 >= max{tau, sigma} * L_DK; equality gives semi-ellipticity.
Certificate certify_lipschitz_k(const StepLengths& steps, double l_dk);

// 1 > tau * sigma * ||A||^2.
Certificate certify_bilinear(const StepLengths& steps, double norm_a);

// 1 > tau*sigma*L_A^2 + tau*L_DA*rho_y/2, valid on X x B(0, rho_y).
Certificate certify_affine_y(const StepLengths& steps, double l_a, double l_da,
                             double rho_y);

// 1 > tau*sigma*(L_A1^2 + ||A2||^2) + tau*L_DA1*rho_y1/2 (single dual step).
Certificate certify_combined(const StepLengths& steps, double l_a1,
                             double l_da1, double rho_y1, double norm_a2);

// 1 >= tau_j (sum_l L_jl + eps) and 1 >= sigma_l (sum_j L_jl + eps);
// lips[j][l] is the Lipschitz factor of the (j,l) coupling block.
Certificate certify_block_lipschitz(
    const StepLengths& steps, const std::vector<std::vector<double>>& lips,
    double epsilon = 0.0);

// 1 >= tau_j (eps + sum_l w_jl ||A_jl||), 1 >= sigma_l (eps + sum_j ||A_jl||/w_jl)
// with free factors w_jl; w_jl = sqrt(sigma_l/tau_j) then local refinement.
// The chosen factors are recorded in the certificate inputs.
Certificate certify_block_bilinear(
    const StepLengths& steps, const std::vector<std::vector<double>>& norms,
    double epsilon = 0.0);

// 1 > tau*(sigma_1*L_A1^2 + sigma_2*||A2||^2) + tau*L_DA1*rho_y1/2.
Certificate certify_two_block(const StepLengths& steps, double l_a1,
                              double l_da1, double rho_y1, double norm_a2);

// Inertia schedule: lambda_k >= 0 non-increasing with
// sup_k (2*lambda_{k+1} + beta*lambda_k) < 1; constant lambda reduces to
// lambda < 1/(2+beta).
Certificate certify_inertia(const StepLengths& steps, double beta);

// 1 > 4*sigma*sqrt(L_DK_y) and 1 >= L_DK * max{tau, sigma/(1-4*sigma*sqrt(L_DK_y))}.
Certificate certify_modified_k(const StepLengths& steps, double l_dk,
                               double l_dk_y);

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

// ||A|| by power iteration on A*A from a seeded random start. Verifies
// <Ax, y> == <x, A*y> on one random pair to 1e-8 relative before iterating.
double estimate_operator_norm(const LinearMap& apply, const LinearMap& adjoint,
                              std::size_t in_dim, std::size_t out_dim,
                              int iters, std::uint64_t seed);

}  // namespace pdsplit
