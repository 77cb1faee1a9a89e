#include "pdsplit/trace_csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "pdsplit/errors.hpp"

namespace pdsplit {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void put_opt(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (v) out << format_double(*v);
}

}  // namespace

void emit_csv(const IterationTrace& trace, std::ostream& out) {
  out << "k,residual,b0_to_ref,lagrangian_gap,fejer_margin,growth_gap,wall_time\n";
  for (const IterationRecord& rec : trace.records) {
    out << rec.k << ',' << format_double(rec.residual);
    put_opt(out, rec.b0_to_ref);
    put_opt(out, rec.lagrangian_gap);
    put_opt(out, rec.fejer_margin);
    put_opt(out, rec.growth_gap);
    put_opt(out, rec.wall_time);
    out << '\n';
  }
  if (!out) throw ConfigError("emit_csv: stream failure");
}

void emit_csv(const IterationTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  emit_csv(trace, out);
}

}  // namespace pdsplit
