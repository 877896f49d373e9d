#include "tpstokes/experiment.hpp"

#include <fstream>
#include <ostream>

#include "tpstokes/curve_io.hpp"
#include "tpstokes/spectra.hpp"
#include "tpstokes/text_format.hpp"
#include "tpstokes/verify.hpp"

namespace tpstokes {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content,
                ExperimentOutcome& out) {
  std::ofstream os(path, std::ios::binary);
  os << content;
  if (!os) throw std::runtime_error("cannot write " + path.string());
  out.files.push_back(path);
}

std::string kv(const std::string& key, const std::string& value) {
  return key + " = " + value + "\n";
}

void simulate(const Config& cfg, const std::filesystem::path& dir, std::ostream& log,
              ExperimentOutcome& out) {
  RunConfig rc{cfg.interface()};
  rc.materials = cfg.materials;
  rc.dt = cfg.numerics.dt;
  rc.t_max = cfg.numerics.t_max;
  rc.equilibrium_tol = cfg.numerics.equilibrium_tol;
  rc.cadence = cfg.numerics.cadence;
  rc.reach_floor = cfg.numerics.reach_floor;
  rc.reach_cap = cfg.numerics.reach_cap;
  rc.scheme = cfg.numerics.scheme;
  rc.rescale_volume = cfg.numerics.rescale_volume;
  rc.assembly.threads = cfg.numerics.threads;

  save_curves(dir / "initial.curve", rc.initial);
  out.files.push_back(dir / "initial.curve");
  const RunResult r = run(rc);

  write_file(dir / "ledger.csv", ledger_csv(r.ledger), out);
  write_file(dir / "final.curve", write_curves(r.final_state.interface), out);
  if (cfg.output.svg) write_file(dir / "final.svg", interface_svg(r.final_state.interface), out);

  std::string s = kv("mode", "simulate");
  s += kv("status", to_string(r.status));
  s += kv("message", r.message);
  s += kv("t_final", format_double(r.final_state.t));
  s += kv("accepted_steps", std::to_string(r.final_state.step_index));
  s += kv("rejected_steps", std::to_string(r.rejections));
  s += kv("ledger_rows", std::to_string(r.ledger.size()));
  s += kv("volume_drift", format_double(volume_drift(r.ledger)));
  s += kv("max_step_area_change", format_double(r.max_step_area_change));
  if (!r.ledger.empty()) {
    s += kv("last_valid_row_header", ledger_header(r.ledger.back().volumes.size()));
    s += kv("last_valid_row", ledger_line(r.ledger.back()));
  }
  try {
    const DecayFit fit = fit_deficit_decade(r.ledger);
    s += kv("deficit_decay_rate", format_double(fit.rate));
    s += kv("deficit_decay_residual", format_double(fit.residual));
    s += kv("deficit_decay_samples", std::to_string(fit.samples));
  } catch (const std::exception& e) {
    s += kv("deficit_decay_rate", "n/a");
  }
  write_file(dir / "summary.txt", s, out);

  log << "simulate: " << to_string(r.status) << " at t = " << format_double(r.final_state.t)
      << " (" << r.message << ")\n";
  out.message = r.message;
  if (r.status == RunStatus::GeometryAbort) out.exit_code = kExitGeometry;
  if (r.status == RunStatus::RegularityAbort) out.exit_code = kExitRegularity;
  if (out.exit_code != kExitOk && !r.ledger.empty())
    log << "last valid ledger row: " << ledger_line(r.ledger.back()) << "\n";
}

void spectrum(const Config& cfg, const std::filesystem::path& dir, std::ostream& log,
              ExperimentOutcome& out) {
  const EquilibriumConfig eq = cfg.equilibrium();
  const int M = cfg.numerics.nodes;
  const Eigen::MatrixXd L = assemble_linearized(eq, cfg.materials, M);
  const SpectrumReport rep = analyze_spectrum(L, cfg.numerics.zero_threshold, M);
  write_file(dir / "spectrum.txt", spectrum_report_text(rep), out);
  log << "spectrum: kernel_dim = " << rep.kernel_dim
      << ", semisimple = " << (rep.semisimple ? "true" : "false")
      << ", spectral_gap = " << format_double(rep.spectral_gap) << "\n";
}

void thermal(const Config& cfg, const std::filesystem::path& dir, std::ostream& log,
             ExperimentOutcome& out) {
  ThermalConfig tc;
  tc.R = cfg.thermal.R;
  tc.R_out = cfg.thermal.R_out;
  tc.materials = cfg.materials;
  tc.inner_points = cfg.thermal.inner_points;
  tc.outer_points = cfg.thermal.outer_points;
  const auto ev = thermal_spectrum(tc, cfg.thermal.eigenvalues);
  std::string s;
  for (double v : ev) s += format_double(v) + "\n";
  write_file(dir / "thermal.txt", s, out);
  log << "thermal: " << ev.size() << " eigenvalues, leading " << format_double(ev.front())
      << "\n";
}

void verification(const Config& cfg, const std::filesystem::path& dir, std::ostream& log,
                  ExperimentOutcome& out) {
  std::vector<std::string> suites =
      cfg.suite == "all" ? suite_names() : std::vector<std::string>{cfg.suite};
  std::string s;
  bool ok = true;
  for (const auto& name : suites) {
    const SuiteReport rep = run_suite(name);
    const std::string text = format_suite(rep);
    log << text;
    s += text;
    ok = ok && rep.passed();
  }
  write_file(dir / "verify.txt", s, out);
  if (!ok) {
    out.exit_code = kExitVerification;
    out.message = "verification failed";
  }
}

}  // namespace

ExperimentOutcome run_experiment(const Config& cfg, const std::filesystem::path& out_dir,
                                 std::ostream& log) {
  ExperimentOutcome out;
  std::filesystem::create_directories(out_dir);
  try {
    switch (cfg.mode) {
      case Mode::Simulate: simulate(cfg, out_dir, log, out); break;
      case Mode::Spectrum: spectrum(cfg, out_dir, log, out); break;
      case Mode::Thermal: thermal(cfg, out_dir, log, out); break;
      case Mode::Verify: verification(cfg, out_dir, log, out); break;
    }
  } catch (const NearContactError& e) {
    out.exit_code = kExitGeometry;
    out.message = std::string("geometry obstruction: ") + e.what();
  } catch (const GeometryError& e) {
    out.exit_code = kExitGeometry;
    out.message = std::string("geometry obstruction: ") + e.what();
  } catch (const StiffnessError& e) {
    out.exit_code = kExitRegularity;
    out.message = std::string("regularity obstruction: ") + e.what();
  } catch (const ConvergenceError& e) {
    out.exit_code = kExitRegularity;
    out.message = std::string("regularity obstruction (eigen-solver): ") + e.what();
  }
  if (out.exit_code != kExitOk) log << "error: " << out.message << "\n";
  return out;
}

}  // namespace tpstokes
