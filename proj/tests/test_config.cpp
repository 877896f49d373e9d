#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpstokes/config.hpp"
#include "tpstokes/experiment.hpp"

using namespace tpstokes;
namespace fs = std::filesystem;

namespace {

std::string errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tpstokes_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal simulate config gets defaults") {
  const Config c = parse_config("[run]\nmode = simulate\n[geometry]\ncircle = 0 0 1\n");
  CHECK(c.mode == Mode::Simulate);
  REQUIRE(c.components.size() == 1);
  CHECK(c.components[0].is_circle());
  CHECK(c.materials.sigma == 1.0);
  CHECK(c.numerics.nodes == 128);
  CHECK(c.numerics.effective_modes() == 31);
  CHECK(c.numerics.dt == 1e-3);
  CHECK(c.numerics.equilibrium_tol == 1e-8);
  CHECK(c.numerics.scheme == Scheme::RK4);
  CHECK(c.output.directory == "out");
  CHECK(c.interface().total_nodes() == 128);
}

TEST_CASE("config errors name keys and lines") {
  const std::string base = "[run]\nmode = simulate\n[geometry]\ncircle = 0 0 1\n";
  CHECK(errors_of(base + "[materials]\nsigma = -1\n").find("line 6: materials.sigma") !=
        std::string::npos);
  CHECK(errors_of(base + "[materials]\nviscosity = 2\n").find("unknown key materials.viscosity") !=
        std::string::npos);
  CHECK(errors_of(base + "[plot]\n").find("unknown section") != std::string::npos);
  CHECK(errors_of("[run]\nmode = simulate\n").find("missing section [geometry]") !=
        std::string::npos);
  CHECK(errors_of("[geometry]\ncircle = 0 0 1\n").find("missing section [run]") !=
        std::string::npos);
  CHECK(errors_of("[run]\nmode = thermal\n").find("[thermal]") != std::string::npos);
  CHECK(errors_of(base + "[numerics]\nnodes = 7\n").find("numerics.nodes") != std::string::npos);
  CHECK(errors_of(base + "[numerics]\ndt = nan\n").find("numerics.dt") != std::string::npos);
  CHECK(errors_of(base + "[numerics]\ndt = 1\ndt = 2\n").find("given twice") != std::string::npos);
  CHECK(errors_of("[run]\nmode = simulate\n[geometry]\ncircle = 0 0 1\ncircle = 1.5 0 1\n")
            .find("disjointness") != std::string::npos);
  CHECK(errors_of("[run]\nmode = spectrum\n[geometry]\ncurve = 0 0 1 0.1 0\n")
            .find("not a circle") != std::string::npos);
  // Several problems are reported together.
  const std::string many = errors_of(base + "[materials]\nsigma = -1\nmu1 = 0\n");
  CHECK(many.find("materials.sigma") != std::string::npos);
  CHECK(many.find("materials.mu1") != std::string::npos);
}

TEST_CASE("spectrum experiment for one circle") {
  const Config c = parse_config(
      "[run]\nmode = spectrum\n[geometry]\ncircle = 0 0 1\n[numerics]\nnodes = 64\n");
  const fs::path dir = scratch("spectrum");
  std::ostringstream log;
  const auto out = run_experiment(c, dir, log);
  CHECK(out.exit_code == kExitOk);
  const std::string text = slurp(dir / "spectrum.txt");
  CHECK(text.find("\"kernel_dim\": 3,") != std::string::npos);
  CHECK(text.find("\"semisimple\": true") != std::string::npos);
}

TEST_CASE("thermal experiment") {
  const Config c = parse_config("[run]\nmode = thermal\n[thermal]\nR = 1\nR_out = 2\neigenvalues = 4\n");
  const fs::path dir = scratch("thermal");
  std::ostringstream log;
  CHECK(run_experiment(c, dir, log).exit_code == kExitOk);
  std::istringstream is(slurp(dir / "thermal.txt"));
  std::vector<double> ev;
  for (double v; is >> v;) ev.push_back(v);
  REQUIRE(ev.size() == 4);
  CHECK(std::abs(ev[0]) <= 1e-8);
  CHECK(ev[1] < 0);
}

TEST_CASE("simulate experiment writes ledger, snapshot and summary") {
  const Config c = parse_config(
      "[run]\nmode = simulate\n[geometry]\ncurve = 0 0 1 0 0 0.05 0\n"
      "[numerics]\nnodes = 64\nmodes = 15\nt_max = 0.05\n");
  const fs::path dir = scratch("simulate");
  std::ostringstream log;
  CHECK(run_experiment(c, dir, log).exit_code == kExitOk);
  const std::string csv = slurp(dir / "ledger.csv");
  CHECK(csv.rfind("t,area,volume_1,dissipation,max_v,reach,deficit\n", 0) == 0);
  CHECK(fs::exists(dir / "final.curve"));
  CHECK(fs::exists(dir / "final.svg"));
  CHECK(slurp(dir / "summary.txt").find("status = time-limit") != std::string::npos);
}

TEST_CASE("verify experiment") {
  const Config c = parse_config("[run]\nmode = verify\n[verify]\nsuite = geometry\n");
  const fs::path dir = scratch("verify");
  std::ostringstream log;
  CHECK(run_experiment(c, dir, log).exit_code == kExitOk);
  CHECK(log.str().find("FAIL") == std::string::npos);
}
