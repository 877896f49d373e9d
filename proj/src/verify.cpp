#include "tpstokes/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tpstokes/spectra.hpp"
#include "tpstokes/stokes_bim.hpp"
#include "tpstokes/text_format.hpp"

namespace tpstokes {

namespace {

constexpr double kPi = std::numbers::pi;
// Observed order of a second-order scheme, to three significant figures.
constexpr double kMinObservedOrder = 1.995;

CheckResult check_le(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured <= tol, measured, tol, std::move(detail)};
}

CheckResult check_eq(std::string name, double measured, double expected, std::string detail = {}) {
  return {std::move(name), measured == expected, measured, expected, std::move(detail)};
}

std::vector<Interfaced> stokes_configs(int M) {
  EquilibriumConfig one{{Circle{{0.0, 0.0}, 1.0}}};
  EquilibriumConfig two{{Circle{{0.0, 0.0}, 1.0}, Circle{{5.0, 0.0}, 1.5}}};
  return {one.interface(M), two.interface(M)};
}

double largest_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd Qa = A.householderQr().householderQ() *
                             Eigen::MatrixXd::Identity(A.rows(), A.cols());
  const Eigen::MatrixXd Qb = B.householderQr().householderQ() *
                             Eigen::MatrixXd::Identity(B.rows(), B.cols());
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(Qa.transpose() * Qb).singularValues();
  const double c = std::clamp(s.minCoeff(), -1.0, 1.0);
  // acos loses accuracy near 1; use the sine form.
  return std::asin(std::sqrt(std::max(0.0, 1.0 - c * c)));
}

SuiteReport suite_prop71() {
  SuiteReport rep{"prop71", {}};
  const MaterialParams mat;
  std::mt19937_64 rng(71);
  std::normal_distribution<double> normal;
  double sym = 0.0, pos = 0.0, kern_apply = 0.0, angle = 0.0;
  bool dims_ok = true;
  std::string dims;
  for (const auto& iface : stokes_configs(128)) {
    const NtDOperator op = assemble_ntd(iface, mat);
    const auto& grid = op.grid();
    const int n = grid.size();
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd g(n), h(n);
      for (int i = 0; i < n; ++i) g[i] = normal(rng), h[i] = normal(rng);
      const double gn = std::sqrt(weighted_inner(grid, g, g));
      const double hn = std::sqrt(weighted_inner(grid, h, h));
      const double d = weighted_inner(grid, apply_ntd(op, g), h) -
                       weighted_inner(grid, g, apply_ntd(op, h));
      sym = std::max(sym, std::abs(d) / (gn * hn));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.weighted_form());
    const Eigen::VectorXd ev = es.eigenvalues();
    pos = std::max(pos, -ev.minCoeff() / ev.maxCoeff());

    const int m = grid.components();
    Eigen::MatrixXd E(n, m);
    for (int k = 0; k < m; ++k) {
      E.col(k) = grid.indicator(k);
      kern_apply = std::max(kern_apply, apply_ntd(op, E.col(k)).cwiseAbs().maxCoeff());
    }
    const Eigen::VectorXd absval = ev.cwiseAbs();
    const double thr = 1e-8 * absval.maxCoeff();
    int dim = 0;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (absval[i] < thr) ++dim, idx.push_back(i);
    dims += (dims.empty() ? "" : ", ") + std::to_string(dim) + "/" + std::to_string(m);
    if (dim != m) {
      dims_ok = false;
      continue;
    }
    Eigen::MatrixXd K(n, dim);
    for (int j = 0; j < dim; ++j) K.col(j) = es.eigenvectors().col(idx[j]);
    angle = std::max(angle, largest_principal_angle(K, E));
  }
  rep.checks.push_back(check_le("(a) symmetry |(Ng|h)-(g|Nh)|/(|g||h|)", sym, 1e-9));
  rep.checks.push_back(check_le("(b) positivity -min/max eig of W N", pos, 1e-9));
  rep.checks.push_back(check_le("(c) |N e_k|_inf", kern_apply, 1e-10));
  CheckResult d = check_le("(d) kernel = span{e_k}, principal angle", angle, 1e-6,
                           "kernel dims " + dims);
  d.passed = d.passed && dims_ok;
  rep.checks.push_back(d);
  return rep;
}

SuiteReport suite_normal_stability() {
  SuiteReport rep{"normal-stability", {}};
  const MaterialParams mat;
  const std::vector<EquilibriumConfig> configs = {
      {{Circle{{0.0, 0.0}, 1.0}}},
      {{Circle{{0.0, 0.0}, 1.0}, Circle{{5.0, 0.0}, 1.5}}}};
  for (const auto& eq : configs) {
    const int m = static_cast<int>(eq.circles.size());
    const std::string tag = "m=" + std::to_string(m) + " ";
    const Eigen::MatrixXd L = assemble_linearized(eq, mat, 128);
    const SpectrumReport s = analyze_spectrum(L, kDefaultZeroThreshold, 128);
    double unstable = 0.0;
    for (const auto& z : s.eigenvalues) unstable = std::max(unstable, -z.real());
    rep.checks.push_back(check_eq(tag + "kernel_dim", s.kernel_dim, 3.0 * m));
    rep.checks.push_back(check_eq(tag + "semisimple (rank L - rank L^2)",
                                  s.rank - s.rank_squared, 0.0));
    rep.checks.push_back(check_le(tag + "max Re(-L eig)/|L|", unstable / s.norm, 1e-7));
    rep.checks.push_back(check_le(tag + "max |Im eig|/|L|", s.max_abs_imag / s.norm, 1e-8));
  }
  return rep;
}

RunResult relaxation_run(double t_max) {
  RunConfig cfg{perturbed_circle(0.05, 128, 31)};
  cfg.t_max = t_max;
  return run(cfg);
}

SuiteReport suite_conservation() {
  SuiteReport rep{"conservation", {}};
  const RunResult r = relaxation_run(2.0);
  rep.checks.push_back(check_le("volume drift (relative)", volume_drift(r.ledger), 1e-6));
  rep.checks.push_back(check_le("largest per-step |G| change / |G|", r.max_step_area_change, 0.0));
  const RowWindow w = lyapunov_window(r.ledger, 1.0);
  rep.checks.push_back(check_le("d|G|/dt vs -sigma(NH|H) relative mismatch",
                                lyapunov_mismatch(r.ledger, 1.0, w), 5e-4,
                                std::to_string(w.last - w.first) + " rows"));
  return rep;
}

SuiteReport suite_convergence() {
  SuiteReport rep{"convergence", {}};
  const RunResult r = relaxation_run(60.0);
  const auto& last = r.ledger.back();
  rep.checks.push_back(check_eq("converged (max|V| < 1e-8)",
                                r.status == RunStatus::Converged ? 1.0 : 0.0, 1.0,
                                to_string(r.status)));
  rep.checks.push_back(check_le("final isoperimetric deficit", last.deficit, 1e-10));
  const double R_inf = std::sqrt(r.ledger.front().volumes[0] / kPi);
  rep.checks.push_back(check_le("final radius error",
                                std::abs(std::sqrt(last.volumes[0] / kPi) - R_inf), 1e-6));
  const DecayFit fit = fit_deficit_decade(r.ledger);
  const EquilibriumConfig eq{{Circle{{0.0, 0.0}, R_inf}}};
  const double gap = analyze_spectrum(assemble_linearized(eq, MaterialParams{}, 128)).spectral_gap;
  rep.checks.push_back(check_le("|deficit rate / (2 gap) - 1|",
                                std::abs(fit.rate / (2.0 * gap) - 1.0), 0.05,
                                "rate " + format_double(fit.rate) + ", gap " + format_double(gap)));
  return rep;
}

// Zeros of J₁ by sign change and bisection.
std::vector<double> bessel_j1_zeros(int count) {
  std::vector<double> z;
  double a = 0.5;
  while (static_cast<int>(z.size()) < count) {
    const double b = a + 0.1;
    double fa = std::cyl_bessel_j(1.0, a), fb = std::cyl_bessel_j(1.0, b);
    if (fa * fb < 0) {
      double lo = a, hi = b;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::cyl_bessel_j(1.0, mid) * fa > 0) lo = mid;
        else hi = mid;
      }
      z.push_back(0.5 * (lo + hi));
    }
    a = b;
  }
  return z;
}

SuiteReport suite_thermal() {
  SuiteReport rep{"thermal", {}};
  ThermalConfig cfg;
  cfg.materials.d1 = 2.0;
  cfg.materials.rho_kappa2 = 3.0;
  const ThermalModes modes = thermal_modes(cfg, 6);
  rep.checks.push_back(check_le("|lambda_0|", std::abs(modes.eigenvalues[0]), 1e-8));
  const Eigen::VectorXd c = modes.modes.col(0);
  rep.checks.push_back(
      check_le("constant mode deviation", (c.array() - c[0]).abs().maxCoeff(), 1e-8));
  double max_rest = -INFINITY;
  for (std::size_t i = 1; i < modes.eigenvalues.size(); ++i)
    max_rest = std::max(max_rest, modes.eigenvalues[i]);
  rep.checks.push_back(check_le("max of remaining eigenvalues", max_rest, 0.0));

  ThermalConfig matched;
  const auto zeros = bessel_j1_zeros(3);
  double order = INFINITY;
  std::vector<double> prev;
  for (int N : {32, 64, 128}) {
    matched.inner_points = matched.outer_points = N;
    const auto ev = thermal_spectrum(matched, 4);
    std::vector<double> err;
    for (int j = 0; j < 3; ++j) {
      const double exact = -std::pow(zeros[j] / matched.R_out, 2);
      err.push_back(std::abs(ev[j + 1] - exact));
    }
    if (!prev.empty())
      for (int j = 0; j < 3; ++j) order = std::min(order, std::log2(prev[j] / err[j]));
    prev = err;
  }
  CheckResult o{"observed order vs Bessel roots (min over 3 modes)", order >= kMinObservedOrder,
                order, kMinObservedOrder, {}};
  rep.checks.push_back(o);
  return rep;
}

SuiteReport suite_geometry() {
  SuiteReport rep{"geometry", {}};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  double gb = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 8;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * K + 1);
    c[0] = 1.0 + 0.5 * (uni(rng) + 1.0);
    for (int k = 1; k <= K; ++k) {
      c[2 * k - 1] = 0.2 * uni(rng) / (k * k);
      c[2 * k] = 0.2 * uni(rng) / (k * k);
    }
    const StarCurved curve({uni(rng), uni(rng)}, c, 256);
    gb = std::max(gb, std::abs(curvature(curve).dot(curve.weights()) + 2.0 * kPi));
  }
  rep.checks.push_back(check_le("Gauss-Bonnet |sum H ds + 2 pi|", gb, 1e-8));

  double round_trip = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double R = 0.5 + (uni(rng) + 1.0);
    const double y0 = 0.3 * R * uni(rng);
    const Eigen::Vector2d y = 0.3 * R * Eigen::Vector2d(uni(rng), uni(rng));
    const double th = kPi * uni(rng);
    const Eigen::Vector2d e(std::cos(th), std::sin(th));
    const Eigen::Vector2d p = R * e + hanzawa_delta(R, y0, y, th) * e;
    round_trip = std::max(round_trip, std::abs((p - y).norm() - (R + y0)));
  }
  rep.checks.push_back(check_le("Hanzawa round-trip", round_trip, 1e-12));

  const double unit = ball_condition_radius(StarCurved::circle({0, 0}, 1.0, 128), 10.0);
  rep.checks.push_back(check_le("reach of unit circle |r - 1|", std::abs(unit - 1.0), 1e-12));
  // Ellipse (2, 1) in polar form, sampled then fitted.
  const int M = 512;
  Eigen::VectorXd samples(M);
  for (int j = 0; j < M; ++j) {
    const double t = 2.0 * kPi * j / M;
    samples[j] = 1.0 / std::sqrt(std::pow(std::cos(t) / 2.0, 2) + std::pow(std::sin(t), 2));
  }
  const StarCurved ellipse = StarCurved::fit({0, 0}, samples, 100, M);
  rep.checks.push_back(check_le("reach of ellipse (2,1) |r - 0.5|",
                                std::abs(ball_condition_radius(ellipse, 10.0) - 0.5), 1e-6));
  rep.checks.push_back(check_le(
      "reach cap binds",
      std::abs(ball_condition_radius(StarCurved::circle({0, 0}, 1.0, 128), 0.25) - 0.25), 0.0));
  const double yl = std::abs(young_laplace_jump(1.0, 1.0, 2) + 1.0) +
                    std::abs(young_laplace_jump(2.0, 3.0, 3) + 3.0) +
                    std::abs(young_laplace_jump(1.0, 2.0, 2) + 2.0);
  rep.checks.push_back(check_le("Young-Laplace values", yl, 0.0));
  return rep;
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"prop71",      "normal-stability", "conservation",
                                                 "convergence", "thermal",          "geometry"};
  return names;
}

SuiteReport run_suite(const std::string& name) {
  if (name == "prop71") return suite_prop71();
  if (name == "normal-stability") return suite_normal_stability();
  if (name == "conservation") return suite_conservation();
  if (name == "convergence") return suite_convergence();
  if (name == "thermal") return suite_thermal();
  if (name == "geometry") return suite_geometry();
  throw std::invalid_argument("unknown verification suite '" + name + "'");
}

std::string format_suite(const SuiteReport& report) {
  std::string s;
  for (const auto& c : report.checks) {
    s += std::string(c.passed ? "PASS" : "FAIL") + "  " + report.suite + ": " + c.name +
         "  measured=" + format_double(c.measured) + "  limit=" + format_double(c.tolerance);
    if (!c.detail.empty()) s += "  (" + c.detail + ")";
    s += "\n";
  }
  return s;
}

Interfaced perturbed_circle(double epsilon, int M, int K, double a0) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * K + 1);
  c[0] = a0;
  if (K >= 2) c[3] = epsilon;
  return Interfaced(StarCurved({0.0, 0.0}, c, M));
}

RowWindow lyapunov_window(const std::vector<LedgerRow>& rows, double sigma,
                          double resolution_floor) {
  std::size_t end = rows.size();
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double predicted = sigma * rows[i].dissipation * (rows[i + 1].t - rows[i].t);
    if (predicted < resolution_floor * rows[i].area) {
      end = i + 1;
      break;
    }
  }
  // Pairs (i, i+1) with i in [first, last).
  const std::size_t pairs = end > 0 ? end - 1 : 0;
  const std::size_t trim = pairs / 10;
  return {trim, pairs - trim};
}

double lyapunov_mismatch(const std::vector<LedgerRow>& rows, double sigma, RowWindow w) {
  double worst = 0.0;
  for (std::size_t i = w.first; i < w.last; ++i) {
    const double dt = rows[i + 1].t - rows[i].t;
    const double measured = rows[i + 1].area_change / dt;
    const double predicted = -sigma * 0.5 * (rows[i].dissipation + rows[i + 1].dissipation);
    worst = std::max(worst, std::abs(measured - predicted) / std::abs(predicted));
  }
  return worst;
}

double volume_drift(const std::vector<LedgerRow>& rows) {
  double drift = 0.0;
  for (const auto& r : rows)
    for (std::size_t k = 0; k < r.volumes.size(); ++k)
      drift = std::max(drift, std::abs(r.volumes[k] - rows.front().volumes[k]) /
                                  rows.front().volumes[k]);
  return drift;
}

DecayFit fit_deficit_decade(const std::vector<LedgerRow>& rows, int decade) {
  const double d0 = rows.front().deficit;
  const double hi = d0 * std::pow(10.0, -decade), lo = hi / 10.0;
  std::vector<double> t, v;
  for (const auto& r : rows)
    if (r.deficit <= hi && r.deficit >= lo) t.push_back(r.t), v.push_back(r.deficit);
  return fit_decay_rate(t, v);
}

}  // namespace tpstokes
