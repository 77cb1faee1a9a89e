#pragma once

#include <cstdint>
#include <random>

namespace pdsplit {

// Seeded random source with hand-rolled output transforms. mt19937_64 is
// fully specified by the standard and the transforms below avoid the
// implementation-defined std:: distributions, so a seed pins the exact
// sample sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller.
  double normal();

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pdsplit
