#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pdsplit/errors.hpp"
#include "pdsplit/pgm.hpp"
#include "pdsplit/run_config.hpp"
#include "pdsplit/solvers.hpp"
#include "pdsplit/trace_csv.hpp"
#include "test_util.hpp"

using namespace pdsplit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_dir() {
  const char* d = std::getenv("PDSPLIT_CONFIG_DIR");
  REQUIRE(d != nullptr);
  return d;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("full round") {
    std::istringstream in(
        "# comment\n"
        "problem.name = rof\n"
        "problem.rows = 8\n"
        "problem.cols = 8\n"
        "problem.alpha = 0.2\n"
        "solver.name = pdps\n"
        "solver.tau = 0.25\n"
        "solver.sigma = 0.3\n"
        "solver.max_iter = 77\n"
        "io.trace = t.csv\n");
    const RunConfig cfg = parse_config(in, "test");
    CHECK(cfg.problem == "rof");
    CHECK(cfg.params.rows == 8);
    CHECK(cfg.params.alpha == 0.2);
    CHECK_FALSE(cfg.auto_steps);
    CHECK(cfg.tau == std::vector<double>{0.25});
    CHECK(cfg.options.max_iter == 77);
    CHECK(cfg.trace_path == "t.csv");
  }
  SUBCASE("parse errors carry line numbers") {
    std::istringstream bad1("problem.name = rof\nnot a key value\n");
    CHECK_THROWS_WITH_AS(parse_config(bad1, "f"),
                         doctest::Contains("f:2"), ConfigError);
    std::istringstream bad2("problem.name = rof\nproblem.rows = soon\n");
    CHECK_THROWS_WITH_AS(parse_config(bad2, "f"),
                         doctest::Contains("f:2"), ConfigError);
    std::istringstream bad3("problem.name = rof\nwhat.ever = 1\n");
    CHECK_THROWS_WITH_AS(parse_config(bad3, "f"),
                         doctest::Contains("unknown key"), ConfigError);
    std::istringstream bad4("problem.rows = 4\n");
    CHECK_THROWS_AS(parse_config(bad4, "f"), ConfigError);
  }
}

TEST_CASE("pgm io") {
  SUBCASE("P2 all-white") {
    std::istringstream in("P2\n3 2\n255\n255 255 255\n255 255 255\n");
    const Image img = read_pgm(in, "mem");
    CHECK(img.rows == 2);
    CHECK(img.cols == 3);
    for (double v : img.pixels) CHECK(v == 1.0);
  }
  SUBCASE("P5 16-bit big-endian fixture") {
    // 1 column, 2 rows, maxval 65535; samples 1 and 65534.
    std::string data = "P5\n1 2\n65535\n";
    data.push_back('\x00');
    data.push_back('\x01');
    data.push_back('\xff');
    data.push_back('\xfe');
    std::istringstream in(data);
    const Image img = read_pgm(in, "mem");
    CHECK(img.pixels[0] == doctest::Approx(1.0 / 65535.0).epsilon(1e-15));
    CHECK(img.pixels[1] == doctest::Approx(65534.0 / 65535.0).epsilon(1e-15));
  }
  SUBCASE("round trip is byte-lossless at quantised precision") {
    Rng rng(7);
    Image img;
    img.rows = 5;
    img.cols = 4;
    img.pixels.resize(20);
    for (auto& v : img.pixels) v = rng.uniform(0, 1);
    std::ostringstream out1;
    write_pgm(out1, img, 255, true);
    std::istringstream back(out1.str());
    const Image again = read_pgm(back, "mem");
    std::ostringstream out2;
    write_pgm(out2, again, 255, true);
    CHECK(out1.str() == out2.str());
  }
  SUBCASE("malformed header and truncated payload") {
    std::istringstream bad1("P7\n1 1\n255\n");
    CHECK_THROWS_AS(read_pgm(bad1, "mem"), ConfigError);
    std::istringstream bad2("P5\n2 2\n255\nab");
    CHECK_THROWS_AS(read_pgm(bad2, "mem"), ConfigError);
  }
}

TEST_CASE("emit_csv") {
  SUBCASE("empty trace yields a header-only file") {
    IterationTrace trace;
    std::ostringstream out;
    emit_csv(trace, out);
    CHECK(out.str() ==
          "k,residual,b0_to_ref,lagrangian_gap,fejer_margin,growth_gap,wall_time\n");
  }
  SUBCASE("three records, missing optionals empty") {
    IterationTrace trace;
    for (long k = 0; k < 3; ++k) {
      IterationRecord rec;
      rec.k = k;
      rec.residual = 0.5 / (k + 1);
      if (k == 1) rec.b0_to_ref = 0.125;
      trace.records.push_back(rec);
    }
    std::ostringstream out;
    emit_csv(trace, out);
    std::istringstream lines(out.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) ++n;
    CHECK(n == 4);
    CHECK(out.str().find("1,0.25,0.125,,,,\n") != std::string::npos);
  }
  SUBCASE("floats parse back exactly") {
    Rng rng(9);
    IterationTrace trace;
    for (long k = 0; k < 50; ++k) {
      IterationRecord rec;
      rec.k = k;
      rec.residual = rng.normal() * std::pow(10.0, rng.uniform(-12, 3));
      trace.records.push_back(rec);
    }
    std::ostringstream out;
    emit_csv(trace, out);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);  // header
    for (long k = 0; k < 50; ++k) {
      std::getline(lines, line);
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      const double parsed = std::strtod(line.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr);
      CHECK(parsed == trace.records[k].residual);
    }
  }
}

TEST_CASE("run_config end to end") {
  SUBCASE("rof demo runs clean and is byte-deterministic") {
    const std::string cfg_path = config_dir() + "/rof_demo.cfg";
    std::ostringstream log;
    REQUIRE(run_config(cfg_path, log) == 0);
    const std::string out1 = slurp("rof_demo_out.pgm");
    const std::string csv1 = slurp("rof_demo_trace.csv");
    const std::string sum1 = slurp("rof_demo_summary.txt");
    CHECK(sum1.find("certificate bilinear") != std::string::npos);
    CHECK(sum1.find("verdict = pass") != std::string::npos);
    REQUIRE(run_config(cfg_path, log) == 0);
    CHECK(slurp("rof_demo_out.pgm") == out1);
    CHECK(slurp("rof_demo_trace.csv") == csv1);
    CHECK(slurp("rof_demo_summary.txt") == sum1);
  }
  SUBCASE("certificate rejection names the rule and margin") {
    RunConfig cfg;
    cfg.problem = "rof";
    cfg.params.rows = 8;
    cfg.params.cols = 8;
    cfg.params.alpha = 0.1;
    cfg.synthetic = "blocks";
    cfg.auto_steps = false;
    ProblemParams pr;
    pr.rows = 8;
    pr.cols = 8;
    pr.image = synthetic_image("blocks", 8, 8);
    const auto p = make_problem("rof", pr);
    // tau*sigma*||A||^2 = 1.21 exactly by construction.
    const double na = *p.meta.norm_a;
    cfg.tau = {1.1 / na};
    cfg.sigma = {1.1 / na};
    cfg.options.max_iter = 5;
    std::ostringstream log;
    CHECK(run_config(cfg, log) == 2);
    CHECK(log.str().find("bilinear") != std::string::npos);
    CHECK(log.str().find("-0.21") != std::string::npos);
  }
  SUBCASE("potts with an affine solver is redirected") {
    RunConfig cfg;
    cfg.problem = "potts";
    cfg.params.rows = 8;
    cfg.params.cols = 8;
    cfg.solver = "pdps";
    std::ostringstream log;
    CHECK(run_config(cfg, log) == 2);
    CHECK(log.str().find("modified_pdps") != std::string::npos);
  }
  SUBCASE("missing config file") {
    std::ostringstream log;
    CHECK(run_config(std::string("definitely_missing.cfg"), log) == 1);
  }
}

TEST_CASE("pdsolve binary smoke test") {
  const char* bin = std::getenv("PDSOLVE_BIN");
  REQUIRE(bin != nullptr);
  const std::string cfg = config_dir() + "/potts_demo.cfg";
  const std::string cmd = std::string(bin) + " run " + cfg + " > pdsolve_log.txt 2>&1";
  const int rc = std::system(cmd.c_str());
  CHECK(rc == 0);
  const std::string log = slurp("pdsolve_log.txt");
  CHECK(log.find("certificate modified_k") != std::string::npos);
  CHECK(log.find("stop_reason = tol") != std::string::npos);
  // certify subcommand alone
  const std::string cmd2 =
      std::string(bin) + " certify " + cfg + " > pdsolve_cert.txt 2>&1";
  CHECK(std::system(cmd2.c_str()) == 0);
  CHECK(slurp("pdsolve_cert.txt").find("verdict = pass") != std::string::npos);
}
