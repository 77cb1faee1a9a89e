#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdsplit/block_vector.hpp"
#include "pdsplit/errors.hpp"
#include "test_util.hpp"

using namespace pdsplit;

TEST_CASE("bv_dot hand examples") {
  const BlockVector a = BlockVector::single({1, 2});
  const BlockVector b = BlockVector::single({3, 4});
  CHECK(bv_dot(a, b) == 11.0);

  const BlockVector z = BlockVector::single({0, 0});
  CHECK(bv_dot(a, z) == 0.0);
}

TEST_CASE("bv_dot equals the naive sequential loop on random input") {
  Rng rng(7);
  std::vector<double> da(100), db(100);
  for (auto& v : da) v = rng.uniform(-2, 2);
  for (auto& v : db) v = rng.uniform(-2, 2);
  // Two blocks, split 40/60.
  BlockVector a({40, 60}, da);
  BlockVector b({40, 60}, db);
  double naive = 0.0;
  for (int i = 0; i < 100; ++i) naive += da[i] * db[i];
  CHECK(bv_dot(a, b) == naive);  // identical order, identical bits
}

TEST_CASE("bv_dot rejects layout mismatch") {
  const BlockVector a({2, 2}, {1, 2, 3, 4});
  const BlockVector b({4}, {1, 2, 3, 4});
  CHECK_THROWS_AS(bv_dot(a, b), LayoutError);
}

TEST_CASE("bv_combine examples") {
  const BlockVector a = BlockVector::single({1.5, -2.0});
  const BlockVector d = bv_combine(1.0, a, -1.0, a);
  for (double v : d.entries()) CHECK(v == 0.0);

  const BlockVector one = BlockVector::single({1});
  const BlockVector five = BlockVector::single({5});
  const BlockVector r = bv_combine(2.0, one, 0.0, five);
  CHECK(r.entries()[0] == 2.0);

  CHECK(norm2(BlockVector({1, 1}, {3, 4})) == 5.0);
}

TEST_CASE("bv_dot is symmetric and bilinear on random inputs") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<std::size_t> layout{3, 5};
    const BlockVector a = testutil::random_bv(layout, rng);
    const BlockVector b = testutil::random_bv(layout, rng);
    const BlockVector c = testutil::random_bv(layout, rng);
    const double s = rng.uniform(-3, 3);
    CHECK(std::abs(bv_dot(a, b) - bv_dot(b, a)) <= 1e-14 * (1 + std::abs(bv_dot(a, b))));
    const double lhs = bv_dot(bv_combine(s, a, 1.0, c), b);
    const double rhs = s * bv_dot(a, b) + bv_dot(c, b);
    CHECK(std::abs(lhs - rhs) <= 1e-14 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("norm2 squared equals bv_dot") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const BlockVector a = testutil::random_bv({8}, rng);
    const double n = norm2(a);
    CHECK(std::abs(n * n - bv_dot(a, a)) <= 1e-14 * (1 + bv_dot(a, a)));
  }
}

TEST_CASE("pd_concat and pd_split round-trip") {
  Rng rng(3);
  PrimalDual u{testutil::random_bv({4, 2}, rng), testutil::random_bv({3}, rng)};
  const BlockVector cat = pd_concat(u);
  CHECK(cat.size() == 9);
  const PrimalDual back = pd_split(cat, 2);
  CHECK(back.x.same_layout(u.x));
  CHECK(back.y.same_layout(u.y));
  for (std::size_t i = 0; i < u.x.size(); ++i)
    CHECK(back.x.entries()[i] == u.x.entries()[i]);
  for (std::size_t i = 0; i < u.y.size(); ++i)
    CHECK(back.y.entries()[i] == u.y.entries()[i]);
}

TEST_CASE("constructor validates data length") {
  CHECK_THROWS_AS(BlockVector({3}, {1.0, 2.0}), LayoutError);
}
