#pragma once

#include <optional>
#include <vector>

#include "pdsplit/block_vector.hpp"

namespace pdsplit {

enum class StopReason { Tol, MaxIter, Numeric };

// One monitored iteration. Optional fields are present only when the run
// carried a reference point; wall_time only when timing was requested.
struct IterationRecord {
  long k = 0;
  double residual = 0.0;
  std::optional<double> b0_to_ref;
  std::optional<double> lagrangian_gap;
  std::optional<double> fejer_margin;
  std::optional<double> growth_gap;
  std::optional<double> wall_time;
};

struct IterationTrace {
  std::vector<IterationRecord> records;  // strictly increasing in k
  PrimalDual initial_u;
  PrimalDual final_u;
  std::optional<PrimalDual> final_ergodic;
  StopReason stop_reason = StopReason::MaxIter;
  long iterations = 0;

  // Full iterate history u^1..u^K, kept only when SolverOptions::ergodic.
  std::vector<PrimalDual> iterates;

  // Declared-region and dual-ball monitors.
  bool region_violated = false;
  long region_first_violation = -1;
  bool dual_ball_violated = false;
  long dual_ball_first_violation = -1;

  std::string numeric_error;  // set when stop_reason == Numeric
};

}  // namespace pdsplit
