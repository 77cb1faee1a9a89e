#include "pdsplit/run_config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pdsplit/errors.hpp"
#include "pdsplit/pgm.hpp"
#include "pdsplit/rng.hpp"
#include "pdsplit/trace_csv.hpp"

namespace pdsplit {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(name, line, "expected a number, got \"" + v + "\"");
  }
}

long parse_long(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(name, line, "expected an integer, got \"" + v + "\"");
  }
}

bool parse_bool(const std::string& name, int line, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(name, line, "expected a boolean, got \"" + v + "\"");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& name) {
  RunConfig cfg;
  cfg.options.max_iter = 1000;
  cfg.options.monitor_every = 1;
  std::string line;
  int lineno = 0;
  bool have_problem = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) fail(name, lineno, "expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(name, lineno, "empty key");
    if (value.empty()) fail(name, lineno, "empty value for " + key);

    if (key == "problem.name") {
      cfg.problem = value;
      have_problem = true;
    } else if (key == "problem.rows") {
      cfg.params.rows = static_cast<std::size_t>(parse_long(name, lineno, value));
    } else if (key == "problem.cols") {
      cfg.params.cols = static_cast<std::size_t>(parse_long(name, lineno, value));
    } else if (key == "problem.alpha") {
      cfg.params.alpha = parse_double(name, lineno, value);
    } else if (key == "problem.omega_x") {
      cfg.params.omega_x = parse_double(name, lineno, value);
    } else if (key == "problem.omega_y") {
      cfg.params.omega_y = parse_double(name, lineno, value);
    } else if (key == "problem.project_dual_ball") {
      cfg.params.project_dual_ball = parse_bool(name, lineno, value);
    } else if (key == "problem.synthetic") {
      cfg.synthetic = value;
    } else if (key == "problem.noise_sigma") {
      cfg.noise_sigma = parse_double(name, lineno, value);
    } else if (key == "problem.noise_seed") {
      cfg.noise_seed = static_cast<std::uint64_t>(parse_long(name, lineno, value));
    } else if (key == "problem.dim") {
      const long d = parse_long(name, lineno, value);
      cfg.params.quad_diag.assign(static_cast<std::size_t>(d), 1.0);
    } else if (key == "problem.fb_q") {
      const double q = parse_double(name, lineno, value);
      for (auto& v : cfg.params.quad_diag) v = q;
    } else if (key == "problem.fb_c") {
      cfg.params.lin_coef.assign(cfg.params.quad_diag.size(),
                                 parse_double(name, lineno, value));
    } else if (key == "problem.f_kind") {
      cfg.params.f_kind = value;
    } else if (key == "solver.name") {
      cfg.solver = value;
    } else if (key == "solver.steps") {
      if (value != "auto") fail(name, lineno, "solver.steps only accepts auto");
      cfg.auto_steps = true;
    } else if (key == "solver.tau") {
      cfg.tau = {parse_double(name, lineno, value)};
      cfg.auto_steps = false;
    } else if (key == "solver.sigma") {
      cfg.sigma = {parse_double(name, lineno, value)};
      cfg.auto_steps = false;
    } else if (key == "solver.sigma1") {
      if (cfg.sigma.size() < 1) cfg.sigma.resize(1);
      cfg.sigma.resize(std::max<std::size_t>(cfg.sigma.size(), 1));
      cfg.sigma[0] = parse_double(name, lineno, value);
      cfg.auto_steps = false;
    } else if (key == "solver.sigma2") {
      cfg.sigma.resize(std::max<std::size_t>(cfg.sigma.size(), 2));
      cfg.sigma[1] = parse_double(name, lineno, value);
      cfg.auto_steps = false;
    } else if (key == "solver.lambda") {
      cfg.lambda = parse_double(name, lineno, value);
    } else if (key == "solver.max_iter") {
      cfg.options.max_iter = parse_long(name, lineno, value);
    } else if (key == "solver.tol") {
      cfg.options.tol = parse_double(name, lineno, value);
    } else if (key == "solver.monitor_every") {
      cfg.options.monitor_every = parse_long(name, lineno, value);
    } else if (key == "solver.uncertified") {
      cfg.options.uncertified = parse_bool(name, lineno, value);
    } else if (key == "solver.seed") {
      cfg.options.seed = static_cast<std::uint64_t>(parse_long(name, lineno, value));
    } else if (key == "solver.record_wall_time") {
      cfg.options.record_wall_time = parse_bool(name, lineno, value);
    } else if (key == "io.input") {
      cfg.input_path = value;
    } else if (key == "io.output") {
      cfg.output_path = value;
    } else if (key == "io.trace") {
      cfg.trace_path = value;
    } else if (key == "io.summary") {
      cfg.summary_path = value;
    } else {
      fail(name, lineno, "unknown key \"" + key + "\"");
    }
  }
  if (!have_problem) throw ConfigError(name + ": missing problem.name");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open for reading");
  return parse_config(in, path);
}

std::vector<double> synthetic_image(const std::string& name, std::size_t rows,
                                    std::size_t cols) {
  if (rows == 0 || cols == 0)
    throw InvalidArgument("synthetic_image: rows and cols must be positive");
  std::vector<double> img(rows * cols, 0.0);
  if (name == "blocks") {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        const bool top = i < rows / 2;
        const bool left = j < cols / 2;
        img[i * cols + j] = top ? (left ? 0.25 : 0.75) : (left ? 0.6 : 0.35);
      }
  } else if (name == "halves") {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        img[i * cols + j] = j < cols / 2 ? 0.25 : 0.75;
  } else if (name == "soft_halves") {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        img[i * cols + j] = j < cols / 2 ? 0.4 : 0.6;
  } else {
    throw InvalidArgument("synthetic_image: unknown pattern \"" + name + "\"");
  }
  return img;
}

void add_noise(std::vector<double>& pixels, double sigma, std::uint64_t seed) {
  if (sigma <= 0) return;
  Rng rng(seed);
  for (double& v : pixels) {
    v += sigma * rng.normal();
    if (v < 0) v = 0;
    if (v > 1) v = 1;
  }
}

StepLengths auto_steps_for(const SaddleProblem& p, const RunConfig& cfg) {
  if (p.kind == "rof" || p.meta.bilinear) {
    const double t = 0.99 / *p.meta.norm_a;
    return StepLengths::uniform(t, t);
  }
  if (p.kind == "fb") {
    const double t = 0.99 / std::max(*p.meta.l_dk, 1e-12);
    return StepLengths::uniform(t, t);
  }
  if (p.kind == "two_block") {
    // tau^2 (L_A1^2 + ||A2||^2) + tau L_DA1 rho_y1 / 2 = 0.95 with
    // sigma_1 = sigma_2 = tau.
    const double a = *p.meta.l_a1 * *p.meta.l_a1 + *p.meta.norm_a2 * *p.meta.norm_a2;
    const double b = *p.meta.l_da1 * *p.meta.rho_y1 / 2.0;
    const double t = (-b + std::sqrt(b * b + 4.0 * a * 0.95)) / (2.0 * a);
    StepLengths s;
    s.tau = {t};
    s.sigma = cfg.solver == "block_pdps" ? std::vector<double>{t, t}
                                         : std::vector<double>{t};
    return s;
  }
  if (p.kind == "potts") {
    const double r = 1.0 / (1.05 * *p.meta.l_dk);
    const double root = std::sqrt(*p.meta.l_dk_y);
    const double sg = r / (1.0 + 4.0 * root * r);
    return StepLengths::uniform(r, sg);
  }
  throw InvalidArgument("auto_steps_for: no policy for problem \"" + p.kind + "\"");
}

Certificate certify_for(const SaddleProblem& p, const std::string& solver,
                        const StepLengths& steps) {
  StepLengths flat = steps;
  if (solver == "modified_pdps")
    return certify_modified_k(flat, p.meta.l_dk.value_or(0.0),
                              p.meta.l_dk_y.value_or(0.0));
  if (p.meta.bilinear) {
    if (flat.sigma.size() > 1)
      throw InvalidArgument("certify_for: bilinear problems take one sigma");
    return certify_bilinear(flat, *p.meta.norm_a);
  }
  if (p.kind == "fb") return certify_lipschitz_k(flat, *p.meta.l_dk);
  if (p.kind == "two_block") {
    if (flat.sigma.size() == 2)
      return certify_two_block(flat, *p.meta.l_a1, *p.meta.l_da1,
                               *p.meta.rho_y1, *p.meta.norm_a2);
    return certify_combined(flat, *p.meta.l_a1, *p.meta.l_da1, *p.meta.rho_y1,
                            *p.meta.norm_a2);
  }
  throw InvalidArgument("certify_for: no rule for problem \"" + p.kind +
                        "\" with solver " + solver);
}

namespace {

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Tol:
      return "tol";
    case StopReason::MaxIter:
      return "max_iter";
    case StopReason::Numeric:
      return "numeric";
  }
  return "?";
}

void write_summary(const std::string& path, const RunConfig& cfg,
                   const SaddleProblem& p, const StepLengths& steps,
                   const Certificate& cert, const IterationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << "problem = " << cfg.problem << "\n";
  out << "solver = " << cfg.solver << "\n";
  out << "tau =";
  for (double t : steps.tau) out << " " << format_double(t);
  out << "\nsigma =";
  for (double s : steps.sigma) out << " " << format_double(s);
  out << "\n";
  if (!steps.lambda.empty())
    out << "lambda = " << format_double(steps.lambda.front()) << "\n";
  out << "\n" << cert.to_text() << "\n";
  out << "stop_reason = " << stop_reason_name(trace.stop_reason) << "\n";
  out << "iterations = " << trace.iterations << "\n";
  if (!trace.records.empty())
    out << "final_residual = " << format_double(trace.records.back().residual)
        << "\n";
  if (trace.region_violated)
    out << "region_violated_at = " << trace.region_first_violation
        << " (certificate not valid for this run)\n";
  if (trace.dual_ball_violated)
    out << "dual_ball_violated_at = " << trace.dual_ball_first_violation
        << " (certificate not valid for this run)\n";
  if (cfg.options.uncertified) out << "uncertified = true\n";
  (void)p;
}

}  // namespace

int run_config(const RunConfig& cfg_in, std::ostream& log) {
  RunConfig cfg = cfg_in;

  // Compatibility gate.
  const bool affine_solver = cfg.solver == "pdps" || cfg.solver == "block_pdps" ||
                             cfg.solver == "inertial_pdps";
  if (cfg.problem == "potts" && affine_solver) {
    log << "error: potts coupling is not affine in y; use solver.name = "
           "modified_pdps\n";
    return 2;
  }

  // Problem data.
  if (cfg.problem != "fb") {
    if (cfg.params.rows == 0 || cfg.params.cols == 0) {
      log << "error: problem.rows and problem.cols are required\n";
      return 1;
    }
    if (!cfg.input_path.empty()) {
      const Image img = read_pgm(cfg.input_path);
      cfg.params.rows = img.rows;
      cfg.params.cols = img.cols;
      cfg.params.image = img.pixels;
    } else {
      cfg.params.image =
          synthetic_image(cfg.synthetic, cfg.params.rows, cfg.params.cols);
      add_noise(cfg.params.image, cfg.noise_sigma, cfg.noise_seed);
    }
  }

  SaddleProblem p = make_problem(cfg.problem, cfg.params);

  StepLengths steps;
  if (cfg.auto_steps) {
    steps = auto_steps_for(p, cfg);
  } else {
    if (cfg.tau.empty() || cfg.sigma.empty()) {
      log << "error: explicit steps need solver.tau and solver.sigma\n";
      return 1;
    }
    steps.tau = cfg.tau;
    steps.sigma = cfg.sigma;
    if (cfg.solver == "block_pdps" && p.dual_layout.size() == 2 &&
        steps.sigma.size() == 1)
      steps.sigma = {steps.sigma[0], steps.sigma[0]};
  }
  if (cfg.lambda >= 0) steps.lambda = {cfg.lambda};

  Certificate cert = certify_for(p, cfg.solver, steps);
  bool cert_ok = cert.ok();
  if (cfg.solver == "inertial_pdps") {
    const Certificate inert = certify_inertia(steps, p.meta.cauchy_beta);
    if (!inert.ok()) {
      cert = inert;
      cert_ok = false;
    }
  }
  log << cert.to_text();
  if (!cert_ok && !cfg.options.uncertified) {
    log << "error: certificate " << cert.rule << " failed with margin "
        << format_double(cert.margin)
        << "; set solver.uncertified = true to run anyway\n";
    return 2;
  }

  // Initial iterate: the data term reference for imaging problems, zero dual.
  PrimalDual u0;
  if (cfg.problem == "fb") {
    u0.x = BlockVector(p.primal_layout);
    u0.y = BlockVector(p.dual_layout);
  } else {
    u0.x = BlockVector(p.primal_layout);
    auto xe = u0.x.entries();
    for (std::size_t i = 0; i < cfg.params.image.size(); ++i)
      xe[i] = cfg.params.image[i];
    u0.y = BlockVector(p.dual_layout);
  }

  SolverOptions opts = cfg.options;
  if (p.meta.rho_y1 && !opts.dual_ball) {
    opts.dual_ball = *p.meta.rho_y1;
    opts.dual_ball_block = 0;
  }

  IterationTrace trace;
  try {
    if (cfg.solver == "pdps")
      trace = solve_pdps(p, steps, u0, opts);
    else if (cfg.solver == "block_pdps")
      trace = solve_block_pdps(p, steps, u0, opts);
    else if (cfg.solver == "inertial_pdps")
      trace = solve_inertial_pdps(p, steps, u0, opts);
    else if (cfg.solver == "modified_pdps")
      trace = solve_modified_pdps(p, steps, u0, opts);
    else {
      log << "error: unknown solver \"" << cfg.solver << "\"\n";
      return 1;
    }
  } catch (const CertificateError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }

  if (!cfg.output_path.empty() && cfg.problem != "fb") {
    Image out;
    out.rows = cfg.params.rows;
    out.cols = cfg.params.cols;
    auto xe = trace.final_u.x.entries();
    out.pixels.assign(xe.begin(), xe.end());
    write_pgm(cfg.output_path, out);
  }
  if (!cfg.trace_path.empty()) emit_csv(trace, cfg.trace_path);
  if (!cfg.summary_path.empty())
    write_summary(cfg.summary_path, cfg, p, steps, cert, trace);

  log << "stop_reason = " << stop_reason_name(trace.stop_reason)
      << ", iterations = " << trace.iterations << "\n";
  if (trace.stop_reason == StopReason::Numeric) {
    log << "error: " << trace.numeric_error << "\n";
    return 3;
  }
  return 0;
}

int run_config(const std::string& path, std::ostream& log) {
  try {
    const RunConfig cfg = parse_config_file(path);
    return run_config(cfg, log);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pdsplit
