#pragma once

#include <iosfwd>
#include <string>

#include "pdsplit/trace.hpp"

namespace pdsplit {

// Writes the trace records as CSV with the exact header
// "k,residual,b0_to_ref,lagrangian_gap,fejer_margin,growth_gap,wall_time".
// Missing optional fields are emitted empty; floats use the shortest decimal
// form that parses back to the same value.
void emit_csv(const IterationTrace& trace, std::ostream& out);
void emit_csv(const IterationTrace& trace, const std::string& path);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace pdsplit
