#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pdsplit/diagnostics.hpp"
#include "pdsplit/errors.hpp"
#include "pdsplit/run_config.hpp"
#include "pdsplit/saddle.hpp"
#include "pdsplit/solvers.hpp"
#include "test_util.hpp"

using namespace pdsplit;
using testutil::DenseMatrix;

namespace {

SaddleProblem quadratic_1d() {
  DenseMatrix A{1, 1, {1.0}};
  return testutil::bilinear_problem(A, ProxFunction::quadratic_data({1.0}),
                                    ProxFunction::quadratic_data({0.0}), 1.0);
}

ProblemParams image_params(std::size_t n, const char* pattern, double alpha) {
  ProblemParams pr;
  pr.rows = n;
  pr.cols = n;
  pr.alpha = alpha;
  pr.image = synthetic_image(pattern, n, n);
  return pr;
}

double max_abs_diff(const PrimalDual& a, const PrimalDual& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i)
    m = std::max(m, std::abs(a.x.entries()[i] - b.x.entries()[i]));
  for (std::size_t i = 0; i < a.y.size(); ++i)
    m = std::max(m, std::abs(a.y.entries()[i] - b.y.entries()[i]));
  return m;
}

PrimalDual zero_start(const SaddleProblem& p) {
  return {BlockVector(p.primal_layout), BlockVector(p.dual_layout)};
}

}  // namespace

TEST_CASE("pdps on the forward-backward reduction") {
  // min_x F(x) + E(x) via G_* = delta_{0}, K(x, y) = E(x): the dual iterate
  // pins to zero and the primal step is exactly forward-backward.
  ProblemParams pr;
  Rng rng(101);
  pr.quad_diag.assign(10, 0.0);
  pr.lin_coef.assign(10, 0.0);
  for (auto& v : pr.quad_diag) v = rng.uniform(0.5, 2.0);
  for (auto& v : pr.lin_coef) v = rng.uniform(-1, 1);
  pr.f_kind = "l1";
  pr.alpha = 0.05;
  const auto p = make_problem("fb", pr);

  const double tau = 0.9 / *p.meta.l_dk;
  SolverOptions opts;
  opts.max_iter = 120;
  opts.ergodic = true;
  PrimalDual u0 = zero_start(p);
  u0.y.entries()[0] = 3.0;  // nonzero dual start must be flushed to 0
  const auto trace = solve_pdps(p, StepLengths::uniform(tau, tau), u0, opts);

  // Independent forward-backward oracle.
  const auto fprox = ProxFunction::scaled_l1(pr.alpha);
  std::vector<double> x(10, 0.0);
  for (int k = 0; k < 120; ++k) {
    std::vector<double> arg(10);
    for (int i = 0; i < 10; ++i)
      arg[i] = x[i] - tau * (pr.quad_diag[i] * x[i] - pr.lin_coef[i]);
    std::vector<double> nx(10);
    fprox.prox(tau, arg, nx);
    x = nx;
    // y^k == 0 for every k >= 1.
    CHECK(trace.iterates[k].y.entries()[0] == 0.0);
  }
  for (int i = 0; i < 10; ++i)
    CHECK(std::abs(trace.final_u.x.entries()[i] - x[i]) <= 1e-12);
}

TEST_CASE("pdps solves the 1-d quadratic saddle") {
  const auto p = quadratic_1d();
  SolverOptions opts;
  opts.max_iter = 200;
  PrimalDual u0 = zero_start(p);
  const auto trace = solve_pdps(p, StepLengths::uniform(0.5, 0.5), u0, opts);
  CHECK(std::abs(trace.final_u.x.entries()[0] - 0.5) <= 1e-8);
  CHECK(std::abs(trace.final_u.y.entries()[0] - 0.5) <= 1e-8);
}

TEST_CASE("pdps keeps the rof fixed point") {
  ProblemParams pr;
  pr.rows = 4;
  pr.cols = 4;
  pr.alpha = 0.2;
  pr.image.assign(16, 0.375);
  const auto p = make_problem("rof", pr);
  PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
  SolverOptions opts;
  opts.max_iter = 50;
  opts.ergodic = true;
  const double t = 0.99 / *p.meta.norm_a;
  const auto trace = solve_pdps(p, StepLengths::uniform(t, t), u0, opts);
  for (const auto& u : trace.iterates) CHECK(max_abs_diff(u, u0) == 0.0);
}

TEST_CASE("pdps refuses non-affine couplings") {
  ProblemParams pr = image_params(4, "halves", 0.1);
  const auto p = make_problem("potts", pr);
  PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
  SolverOptions opts;
  CHECK_THROWS_WITH_AS(
      solve_pdps(p, StepLengths::uniform(0.01, 0.01), u0, opts),
      doctest::Contains("solve_modified_pdps"), InvalidArgument);
}

TEST_CASE("block pdps with one block reduces to pdps bitwise") {
  ProblemParams pr = image_params(8, "blocks", 0.15);
  const auto p = make_problem("rof", pr);
  PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
  SolverOptions opts;
  opts.max_iter = 200;
  const double t = 0.99 / *p.meta.norm_a;
  const auto a = solve_pdps(p, StepLengths::uniform(t, t), u0, opts);
  const auto b = solve_block_pdps(p, StepLengths::uniform(t, t), u0, opts);
  CHECK(max_abs_diff(a.final_u, b.final_u) == 0.0);
}

TEST_CASE("block pdps solves the two-block problem") {
  ProblemParams pr = image_params(8, "blocks", 0.05);
  pr.omega_x = 1.2;
  pr.omega_y = 1.0;
  const auto p = make_problem("two_block", pr);

  SUBCASE("equal dual steps, certified") {
    StepLengths s;
    const double a = *p.meta.l_a1 * *p.meta.l_a1 + *p.meta.norm_a2 * *p.meta.norm_a2;
    const double b = *p.meta.l_da1 * *p.meta.rho_y1 / 2.0;
    const double t = (-b + std::sqrt(b * b + 4.0 * a * 0.95)) / (2.0 * a);
    s.tau = {t};
    s.sigma = {t, t};
    REQUIRE(certify_two_block(s, *p.meta.l_a1, *p.meta.l_da1, *p.meta.rho_y1,
                              *p.meta.norm_a2)
                .verdict == Verdict::Pass);
    PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
    SolverOptions opts;
    opts.max_iter = 5000;
    opts.tol = 1e-9;
    opts.monitor_every = 50;
    const auto trace = solve_block_pdps(p, s, u0, opts);
    CHECK(optimality_residual(p, s, trace.final_u) < 1e-8);
    CHECK_FALSE(trace.region_violated);
  }
  SUBCASE("unequal dual steps, certified") {
    StepLengths s;
    s.tau = {0.15};
    s.sigma = {0.8, 0.25};
    REQUIRE(certify_two_block(s, *p.meta.l_a1, *p.meta.l_da1, *p.meta.rho_y1,
                              *p.meta.norm_a2)
                .verdict == Verdict::Pass);
    PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
    SolverOptions opts;
    opts.max_iter = 5000;
    opts.tol = 1e-9;
    opts.monitor_every = 50;
    const auto trace = solve_block_pdps(p, s, u0, opts);
    CHECK(optimality_residual(p, s, trace.final_u) < 1e-8);
  }
}

TEST_CASE("inertial pdps") {
  ProblemParams pr = image_params(8, "blocks", 0.15);
  const auto p = make_problem("rof", pr);
  PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
  const double t = 0.99 / *p.meta.norm_a;

  SUBCASE("lambda = 0 matches pdps to 1e-12 over 500 iterations") {
    SolverOptions opts;
    opts.max_iter = 500;
    StepLengths s0 = StepLengths::uniform(t, t);
    const auto plain = solve_pdps(p, s0, u0, opts);
    StepLengths si = s0;
    si.lambda = {0.0};
    const auto inert = solve_inertial_pdps(p, si, u0, opts);
    CHECK(max_abs_diff(plain.final_u, inert.final_u) <= 1e-12);
  }
  SUBCASE("lambda = 0.34 with beta = 1 is rejected without the flag") {
    StepLengths si = StepLengths::uniform(t, t);
    si.lambda = {0.34};
    SolverOptions opts;
    opts.max_iter = 10;
    CHECK_THROWS_AS(solve_inertial_pdps(p, si, u0, opts), CertificateError);
    opts.uncertified = true;
    CHECK_NOTHROW(solve_inertial_pdps(p, si, u0, opts));
  }
  SUBCASE("non-bilinear couplings are rejected") {
    ProblemParams tp = image_params(4, "blocks", 0.1);
    const auto twob = make_problem("two_block", tp);
    PrimalDual w0{BlockVector::single(tp.image), BlockVector(twob.dual_layout)};
    StepLengths si = StepLengths::uniform(0.1, 0.1);
    si.lambda = {0.1};
    SolverOptions opts;
    CHECK_THROWS_AS(solve_inertial_pdps(twob, si, w0, opts), InvalidArgument);
  }
}

TEST_CASE("modified pdps") {
  SUBCASE("reduces to pdps on affine couplings within 1e-12") {
    ProblemParams pr = image_params(8, "blocks", 0.15);
    const auto p = make_problem("rof", pr);
    PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
    const double t = 0.99 / *p.meta.norm_a;
    SolverOptions opts;
    opts.max_iter = 500;
    const auto plain = solve_pdps(p, StepLengths::uniform(t, t), u0, opts);
    const auto mod = solve_modified_pdps(p, StepLengths::uniform(t, t), u0, opts);
    CHECK(max_abs_diff(plain.final_u, mod.final_u) <= 1e-12);
  }
  SUBCASE("first iteration equals one linearised pdps iteration") {
    ProblemParams pr = image_params(4, "halves", 0.1);
    pr.omega_x = 1.2;
    pr.omega_y = 2.0;
    const auto p = make_problem("potts", pr);
    PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
    StepLengths s = StepLengths::uniform(1.0 / (1.05 * *p.meta.l_dk), 0.0);
    s.sigma[0] = s.tau[0] / (1.0 + 4.0 * std::sqrt(*p.meta.l_dk_y) * s.tau[0]);
    SolverOptions opts;
    opts.max_iter = 1;
    opts.ergodic = true;
    const auto trace = solve_modified_pdps(p, s, u0, opts);

    // Reference: x1 = prox(x - tau dx); y1 = y + sigma(2 dyK(x1,y) - dyK(x,y)).
    const BlockVector dx = p.coupling.grad_x(u0.x, u0.y);
    BlockVector xarg = bv_combine(1.0, u0.x, -s.tau[0], dx);
    BlockVector x1 = p.prox_f(std::vector<double>{s.tau[0]}, xarg);
    const BlockVector dyn = p.coupling.grad_y(x1, u0.y);
    const BlockVector dyc = p.coupling.grad_y(u0.x, u0.y);
    BlockVector y1(p.dual_layout);
    for (std::size_t i = 0; i < y1.size(); ++i)
      y1.entries()[i] = u0.y.entries()[i] +
                        s.sigma[0] * (2.0 * dyn.entries()[i] - dyc.entries()[i]);
    CHECK(max_abs_diff(trace.iterates[0], PrimalDual{x1, y1}) <= 1e-14);
  }
  SUBCASE("uncertifiable steps are rejected without the flag") {
    ProblemParams pr = image_params(4, "halves", 0.1);
    const auto p = make_problem("potts", pr);
    PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
    SolverOptions opts;
    opts.max_iter = 5;
    CHECK_THROWS_AS(
        solve_modified_pdps(p, StepLengths::uniform(1.0, 1.0), u0, opts),
        CertificateError);
  }
  SUBCASE("solves an 8x8 two-region potts instance") {
    ProblemParams pr = image_params(8, "soft_halves", 0.0);
    pr.omega_x = 1.1;
    pr.omega_y = 1.0;
    const auto p = make_problem("potts", pr);
    PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
    StepLengths s;
    const double r = 1.0 / (1.05 * *p.meta.l_dk);
    s.tau = {r};
    s.sigma = {r / (1.0 + 4.0 * std::sqrt(*p.meta.l_dk_y) * r)};
    REQUIRE(certify_modified_k(s, *p.meta.l_dk, *p.meta.l_dk_y).verdict ==
            Verdict::Pass);
    SolverOptions opts;
    opts.max_iter = 20000;
    opts.tol = 1e-7;
    opts.monitor_every = 100;
    const auto trace = solve_modified_pdps(p, s, u0, opts);
    CHECK(optimality_residual(p, s, trace.final_u) < 1e-6);
    CHECK_FALSE(trace.region_violated);
  }
  SUBCASE("potts primal objective is non-increasing over the tail") {
    ProblemParams pr = image_params(8, "soft_halves", 0.0);
    pr.omega_x = 1.1;
    pr.omega_y = 1.0;
    const auto p = make_problem("potts", pr);
    PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
    StepLengths s;
    const double r = 1.0 / (1.05 * *p.meta.l_dk);
    s.tau = {r};
    s.sigma = {r / (1.0 + 4.0 * std::sqrt(*p.meta.l_dk_y) * r)};
    SolverOptions opts;
    opts.max_iter = 60000;
    opts.ergodic = true;
    opts.monitor_every = 60000;
    const auto trace = solve_modified_pdps(p, s, u0, opts);
    // Objective = data term + sup-evaluated regularizer (count of pixels
    // whose gradient supports a nonzero |.|_0 contribution).
    GridGradient gg(8, 8);
    std::vector<double> g(gg.field_size());
    auto objective = [&](const PrimalDual& u) {
      double data = 0.0;
      for (std::size_t i = 0; i < 64; ++i) {
        const double d = u.x.entries()[i] - pr.image[i];
        data += 0.5 * d * d;
      }
      gg.apply(u.x.entries(), g);
      int count = 0;
      for (std::size_t q = 0; q < 64; ++q)
        if (std::hypot(g[2 * q], g[2 * q + 1]) > 1e-5) ++count;
      return data + count;
    };
    double prev = objective(trace.iterates[6000 - 1]);
    for (std::size_t k = 6100; k <= 60000; k += 100) {
      const double cur = objective(trace.iterates[k - 1]);
      CHECK(cur <= prev + 1e-9 * (1.0 + std::abs(prev)));
      prev = cur;
    }
  }
}

TEST_CASE("ergodic_average") {
  const auto p = quadratic_1d();
  SolverOptions opts;
  opts.max_iter = 10;
  opts.ergodic = true;
  PrimalDual u0 = zero_start(p);
  const auto trace = solve_pdps(p, StepLengths::uniform(0.5, 0.5), u0, opts);

  SUBCASE("N = 1 returns u^1 exactly") {
    const PrimalDual e1 = ergodic_average(trace, 1);
    CHECK(max_abs_diff(e1, trace.iterates[0]) == 0.0);
  }
  SUBCASE("matches the direct sum to 1e-14") {
    for (long N : {3L, 7L, 10L}) {
      const PrimalDual got = ergodic_average(trace, N);
      double sx = 0.0, sy = 0.0;
      for (long k = 0; k < N; ++k) {
        sx += trace.iterates[k].x.entries()[0];
        sy += trace.iterates[k].y.entries()[0];
      }
      CHECK(std::abs(got.x.entries()[0] - sx / N) <= 1e-14);
      CHECK(std::abs(got.y.entries()[0] - sy / N) <= 1e-14);
    }
  }
  SUBCASE("constant sequence averages to itself") {
    ProblemParams pr;
    pr.rows = 2;
    pr.cols = 2;
    pr.alpha = 0.3;
    pr.image.assign(4, 0.5);
    const auto rof = make_problem("rof", pr);
    PrimalDual c0{BlockVector::single(pr.image), BlockVector(rof.dual_layout)};
    SolverOptions o2;
    o2.max_iter = 5;
    o2.ergodic = true;
    const auto t2 = solve_pdps(rof, StepLengths::uniform(0.3, 0.3), c0, o2);
    CHECK(max_abs_diff(ergodic_average(t2, 5), c0) == 0.0);
  }
  SUBCASE("N = 0 rejected") {
    CHECK_THROWS_AS(ergodic_average(trace, 0), InvalidArgument);
  }
}

TEST_CASE("determinism: identical runs produce bit-identical traces") {
  ProblemParams pr = image_params(8, "blocks", 0.12);
  const auto p = make_problem("rof", pr);
  PrimalDual u0{BlockVector::single(pr.image), BlockVector(p.dual_layout)};
  SolverOptions opts;
  opts.max_iter = 300;
  opts.monitor_every = 10;
  opts.reference = u0;  // any reference exercises the optional records
  const double t = 0.99 / *p.meta.norm_a;
  const auto a = solve_pdps(p, StepLengths::uniform(t, t), u0, opts);
  const auto b = solve_pdps(p, StepLengths::uniform(t, t), u0, opts);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].k == b.records[i].k);
    CHECK(a.records[i].residual == b.records[i].residual);
    CHECK(*a.records[i].b0_to_ref == *b.records[i].b0_to_ref);
  }
  CHECK(max_abs_diff(a.final_u, b.final_u) == 0.0);
}

TEST_CASE("fejer monotonicity of B0 to the solution on a certified run") {
  const auto p = quadratic_1d();
  const PrimalDual ubar{BlockVector::single({0.5}), BlockVector::single({0.5})};
  SolverOptions opts;
  opts.max_iter = 300;
  opts.reference = ubar;
  PrimalDual u0 = zero_start(p);
  const StepLengths s = StepLengths::uniform(0.7, 0.7);
  REQUIRE(certify_bilinear(s, 1.0).verdict == Verdict::Pass);
  const auto trace = solve_pdps(p, s, u0, opts);
  double prev = *trace.records.front().b0_to_ref;
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const double cur = *trace.records[i].b0_to_ref;
    CHECK(cur <= prev + 1e-9 * (1.0 + std::abs(prev)));
    // The recorded Fejer margin itself stays non-negative up to rounding.
    CHECK(*trace.records[i].fejer_margin >= -1e-9 * (1.0 + std::abs(prev)));
    prev = cur;
  }
}

TEST_CASE("numeric blowup aborts with stop_reason numeric") {
  DenseMatrix A{1, 1, {10.0}};
  const auto p = testutil::bilinear_problem(A, ProxFunction::zero(),
                                            ProxFunction::zero(), 10.0);
  PrimalDual u0{BlockVector::single({1.0}), BlockVector::single({1.0})};
  SolverOptions opts;
  opts.max_iter = 2000;
  const auto trace = solve_pdps(p, StepLengths::uniform(10.0, 10.0), u0, opts);
  CHECK(trace.stop_reason == StopReason::Numeric);
  CHECK_FALSE(trace.numeric_error.empty());
}

TEST_CASE("dual ball monitor logs departures") {
  const auto p = quadratic_1d();
  PrimalDual u0 = zero_start(p);
  SolverOptions opts;
  opts.max_iter = 100;
  opts.dual_ball = 0.1;  // solution has ||ybar|| = 0.5, so this must trip
  const auto trace = solve_pdps(p, StepLengths::uniform(0.5, 0.5), u0, opts);
  CHECK(trace.dual_ball_violated);
  CHECK(trace.dual_ball_first_violation >= 0);
}
