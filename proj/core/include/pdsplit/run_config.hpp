#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pdsplit/saddle.hpp"
#include "pdsplit/solvers.hpp"

namespace pdsplit {

// Flat key=value run configuration with problem. / solver. / io. sections.
struct RunConfig {
  std::string problem;  // rof | two_block | potts | fb
  ProblemParams params;
  std::string synthetic = "blocks";  // used when io.input is absent
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;

  std::string solver = "pdps";  // pdps | block_pdps | inertial_pdps | modified_pdps
  bool auto_steps = true;
  std::vector<double> tau;
  std::vector<double> sigma;
  double lambda = -1.0;  // < 0 means no inertia key present
  SolverOptions options;

  std::string input_path;
  std::string output_path;
  std::string trace_path;
  std::string summary_path;
};

RunConfig parse_config(std::istream& in, const std::string& name);
RunConfig parse_config_file(const std::string& path);

// Step policy for steps = auto; returns certified steps for the problem.
StepLengths auto_steps_for(const SaddleProblem& p, const RunConfig& cfg);

// The certificate the given solver/problem combination must pass.
Certificate certify_for(const SaddleProblem& p, const std::string& solver,
                        const StepLengths& steps);

// Executes a parsed configuration end to end: build problem, certify steps,
// solve, write output image / trace CSV / summary. Returns the process exit
// status: 0 on tol or max_iter, 2 on certificate or compatibility rejection,
// 3 on numeric failure.
int run_config(const RunConfig& cfg, std::ostream& log);

// Convenience: parse + execute; parse errors return status 1.
int run_config(const std::string& path, std::ostream& log);

// Deterministic demo images in [0, 1]: "blocks" (four constant quadrants)
// or "halves" (two constant vertical regions).
std::vector<double> synthetic_image(const std::string& name, std::size_t rows,
                                    std::size_t cols);

// Adds seeded Gaussian noise in [0, 1] space and clamps.
void add_noise(std::vector<double>& pixels, double sigma, std::uint64_t seed);

}  // namespace pdsplit
