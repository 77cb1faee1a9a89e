#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pdsplit/errors.hpp"
#include "pdsplit/prox.hpp"
#include "test_util.hpp"

using namespace pdsplit;

TEST_CASE("prox_apply closed forms") {
  SUBCASE("quadratic data, b = 0") {
    const auto f = ProxFunction::quadratic_data({0.0});
    const BlockVector x = BlockVector::single({2.0});
    CHECK(prox_apply(f, 1.0, x).entries()[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("soft threshold") {
    const auto f = ProxFunction::scaled_l1(1.0);
    const BlockVector x = BlockVector::single({3.0, 0.5});
    const BlockVector r = prox_apply(f, 1.0, x);
    CHECK(r.entries()[0] == doctest::Approx(2.0));
    CHECK(r.entries()[1] == 0.0);
    // Tie |x| = tau*alpha resolves to 0.
    const BlockVector tie = prox_apply(f, 1.0, BlockVector::single({1.0, -1.0}));
    CHECK(tie.entries()[0] == 0.0);
    CHECK(tie.entries()[1] == 0.0);
  }
  SUBCASE("pointwise 2-ball projection") {
    const auto f = ProxFunction::ball2_pointwise(1.0);
    const BlockVector x = BlockVector::single({3.0, 4.0});
    const BlockVector r = prox_apply(f, 0.7, x);
    CHECK(r.entries()[0] == doctest::Approx(0.6));
    CHECK(r.entries()[1] == doctest::Approx(0.8));
  }
  SUBCASE("indicator of zero and zero function") {
    const BlockVector x = BlockVector::single({1.0, -2.0});
    const BlockVector z = prox_apply(ProxFunction::indicator_zero(), 2.0, x);
    CHECK(z.entries()[0] == 0.0);
    CHECK(z.entries()[1] == 0.0);
    const BlockVector id = prox_apply(ProxFunction::zero(), 2.0, x);
    CHECK(id.entries()[0] == 1.0);
    CHECK(id.entries()[1] == -2.0);
  }
  SUBCASE("tau must be positive") {
    const auto f = ProxFunction::zero();
    const BlockVector x = BlockVector::single({1.0});
    CHECK_THROWS_AS(prox_apply(f, 0.0, x), InvalidArgument);
    CHECK_THROWS_AS(prox_apply(f, -1.0, x), InvalidArgument);
  }
}

TEST_CASE("prox_oracle basics") {
  SUBCASE("quadratic data known minimiser") {
    auto fv = [](std::size_t, double w) { return 0.5 * w * w; };
    const std::vector<double> x{2.0};
    const auto r = prox_oracle(fv, 1.0, x, -5, 5, 1e-8);
    CHECK(std::abs(r[0] - 1.0) <= 1e-6);
  }
  SUBCASE("quartic: root of 4w^3 + w - 1 = 0") {
    auto fv = [](std::size_t, double w) { return w * w * w * w; };
    const std::vector<double> x{1.0};
    const auto r = prox_oracle(fv, 1.0, x, -5, 5, 1e-8);
    // Newton root-find on the optimality equation 4w^3 + w - 1 = 0.
    double root = 0.4;
    for (int it = 0; it < 60; ++it)
      root -= (4 * root * root * root + root - 1) / (12 * root * root + 1);
    CHECK(root == doctest::Approx(0.5).epsilon(1e-12));  // exact root
    CHECK(std::abs(r[0] - root) <= 1e-4);
  }
  SUBCASE("argument validation") {
    auto fv = [](std::size_t, double) { return 0.0; };
    const std::vector<double> x{0.0};
    CHECK_THROWS_AS(prox_oracle(fv, 1.0, x, 1.0, 1.0, 1e-8), InvalidArgument);
    CHECK_THROWS_AS(prox_oracle(fv, 1.0, x, -1.0, 1.0, 0.0), InvalidArgument);
  }
}

TEST_CASE("oracle matches the analytic soft threshold on random input") {
  Rng rng(11);
  const double alpha = 0.7;
  const auto f = ProxFunction::scaled_l1(alpha);
  auto fv = [alpha](std::size_t, double w) { return alpha * std::abs(w); };
  for (int trial = 0; trial < 100; ++trial) {
    const double tau = rng.uniform(0.1, 2.0);
    std::vector<double> x{rng.uniform(-3, 3)};
    const auto got = prox_oracle(fv, tau, x, -5, 5, 1e-8);
    const BlockVector want = prox_apply(f, tau, BlockVector::single(x));
    CHECK(std::abs(got[0] - want.entries()[0]) <= 1e-6);
  }
}

TEST_CASE("nonexpansiveness of the convex prox maps") {
  Rng rng(23);
  const auto fq = ProxFunction::quadratic_data(std::vector<double>(4, 0.3));
  const auto fl = ProxFunction::scaled_l1(0.5);
  const auto fb = ProxFunction::ball2_pointwise(0.8);
  for (int trial = 0; trial < 100; ++trial) {
    const double tau = rng.uniform(0.05, 3.0);
    const BlockVector a = testutil::random_bv({4}, rng, -2, 2);
    const BlockVector b = testutil::random_bv({4}, rng, -2, 2);
    for (const ProxFunction* f : {&fq, &fl, &fb}) {
      const BlockVector pa = prox_apply(*f, tau, a);
      const BlockVector pb = prox_apply(*f, tau, b);
      const double lhs = norm2(bv_combine(1, pa, -1, pb));
      const double rhs = norm2(bv_combine(1, a, -1, b));
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("prox fixed point at the minimiser") {
  const std::vector<double> b{0.2, -0.4, 1.1};
  const auto f = ProxFunction::quadratic_data(b);
  const BlockVector m = BlockVector::single(b);
  const BlockVector r = prox_apply(f, 1.7, m);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(r.entries()[i] == doctest::Approx(b[i]).epsilon(1e-15));

  const BlockVector z = BlockVector::single({0.0, 0.0});
  const BlockVector rl = prox_apply(ProxFunction::scaled_l1(1.0), 0.5, z);
  CHECK(rl.entries()[0] == 0.0);
}

TEST_CASE("values of indicator kinds") {
  const auto fb = ProxFunction::ball2_pointwise(1.0);
  std::vector<double> inside{0.6, 0.8};
  std::vector<double> outside{1.0, 1.0};
  CHECK(fb.value(inside) == 0.0);
  CHECK(std::isinf(fb.value(outside)));

  const auto fz = ProxFunction::indicator_zero();
  std::vector<double> zero{0.0};
  std::vector<double> nonzero{0.5};
  CHECK(fz.value(zero) == 0.0);
  CHECK(std::isinf(fz.value(nonzero)));
}
