// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Every tolerance below is fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tpstokes/config.hpp"
#include "tpstokes/evolution.hpp"
#include "tpstokes/experiment.hpp"
#include "tpstokes/spectra.hpp"
#include "tpstokes/stokes_bim.hpp"
#include "tpstokes/verify.hpp"

using namespace tpstokes;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

int failures = 0;

void report(int id, const char* what, bool ok, const std::string& measured) {
  std::printf("[%2d] %s  %s  %s\n", id, ok ? "PASS" : "FAIL", what, measured.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<Interfaced> ntd_configs() {
  return {Interfaced(StarCurved::circle({0, 0}, 1.0, 128)),
          Interfaced({StarCurved::circle({0, 0}, 1.0, 128),
                      StarCurved::circle({5, 0}, 1.5, 128)})};
}

void ntd_properties(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  double sym = 0, pos = 0, angle = 0;
  bool dims = true;
  std::string dim_text;
  for (const auto& iface : ntd_configs()) {
    const NtDOperator op = assemble_ntd(iface, MaterialParams{});
    const auto& grid = op.grid();
    const int N = grid.size(), m = grid.components();
    const Eigen::VectorXd w = grid.weights;
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd g(N), h(N);
      for (int i = 0; i < N; ++i) g[i] = n(rng), h[i] = n(rng);
      const Eigen::MatrixXd& A = op.matrix();
      const double lhs = (A * g).cwiseProduct(w).dot(h);
      const double rhs = g.cwiseProduct(w).dot(A * h);
      const double gn = std::sqrt(g.cwiseProduct(w).dot(g)), hn = std::sqrt(h.cwiseProduct(w).dot(h));
      sym = std::max(sym, std::abs(lhs - rhs) / (gn * hn));
    }
    const Eigen::MatrixXd WN = w.asDiagonal() * op.matrix();
    const Eigen::MatrixXd S = 0.5 * (WN + WN.transpose());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues();
    pos = std::max(pos, -ev.minCoeff() / ev.maxCoeff());

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(WN, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    int dim = 0;
    for (int i = 0; i < sv.size(); ++i) dim += sv[i] < 1e-8 * sv[0];
    dim_text += (dim_text.empty() ? "" : ",") + std::to_string(dim);
    if (dim != m) {
      dims = false;
      continue;
    }
    const Eigen::MatrixXd V = svd.matrixV().rightCols(dim);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(N, m);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < N; ++i) E(i, k) = grid.component_index[i] == k ? 1.0 / std::sqrt(grid.nodes_in(k)) : 0.0;
    // Largest principal angle via the residual of projecting E onto span V.
    const Eigen::MatrixXd R = E - V * (V.transpose() * E);
    angle = std::max(angle, std::asin(std::min(1.0, Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()[0])));
  }
  report(1, "NtD symmetry |(Ng|h)_W-(g|Nh)_W|/(|g||h|) <= 1e-9", sym <= 1e-9, num(sym));
  report(2, "NtD positivity -min/max eig <= 1e-9", pos <= 1e-9, num(pos));
  report(3, "NtD kernel dim = m, angle to span{e_k} <= 1e-6", dims && angle <= 1e-6,
         "dims " + dim_text + " angle " + num(angle));
}

void relaxation() {
  RunConfig cfg{perturbed_circle(0.05, 128, 31)};
  cfg.dt = 1e-3;
  cfg.t_max = 60.0;
  cfg.equilibrium_tol = 1e-8;
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& rows = r.ledger;

  double drift = 0;
  for (const auto& row : rows)
    drift = std::max(drift, std::abs(row.volumes[0] - rows[0].volumes[0]) / rows[0].volumes[0]);
  report(4, "volume drift <= 1e-6 relative", drift <= 1e-6, num(drift));

  const RowWindow w = lyapunov_window(rows, 1.0);
  double mismatch = 0;
  for (std::size_t i = w.first; i < w.last; ++i) {
    const double rate = rows[i + 1].area_change / (rows[i + 1].t - rows[i].t);
    const double pred = -0.5 * (rows[i].dissipation + rows[i + 1].dissipation);
    mismatch = std::max(mismatch, std::abs(rate / pred - 1.0));
  }
  const bool lyap = r.max_step_area_change <= 0.0 && mismatch <= 5e-4 && w.last > w.first + 100;
  report(5, "area non-increasing every step; d|G|/dt = -sigma(NH|H) to 3 s.f.", lyap,
         "max step dA/A " + num(r.max_step_area_change) + ", mismatch " + num(mismatch) + " over t in [" +
             num(rows[w.first].t) + ", " + num(rows[w.last].t) + "]");

  const auto& last = rows.back();
  const double R_inf = std::sqrt(rows[0].volumes[0] / pi);
  const double r_err = std::abs(std::sqrt(last.volumes[0] / pi) - R_inf);
  const DecayFit fit = fit_deficit_decade(rows);
  const EquilibriumConfig eq{{Circle{{0, 0}, R_inf}}};
  const double gap = analyze_spectrum(assemble_linearized(eq, MaterialParams{}, 128)).spectral_gap;
  // The deficit is quadratic in the perturbation amplitude: its rate is 2·gap.
  const double rate_err = std::abs(fit.rate / (2.0 * gap) - 1.0);
  const bool conv = r.status == RunStatus::Converged && last.max_v < 1e-8 &&
                    last.deficit <= 1e-10 && r_err <= 1e-6 && rate_err <= 0.05;
  report(6, "converges; deficit <= 1e-10; radius to 1e-6; deficit rate vs 2*gap within 5%", conv,
         to_string(r.status) + " t=" + num(last.t) + " deficit " + num(last.deficit) +
             " radius err " + num(r_err) + " rate " + num(fit.rate) + " gap " + num(gap) +
             " rel " + num(rate_err) + " (" + num(secs) + " s)");
}

void normal_stability() {
  bool ok = true;
  std::string text;
  const std::vector<EquilibriumConfig> cfgs = {
      {{Circle{{0, 0}, 1.0}}}, {{Circle{{0, 0}, 1.0}, Circle{{5, 0}, 1.5}}}};
  for (const auto& eq : cfgs) {
    const int m = static_cast<int>(eq.circles.size());
    const SpectrumReport s = analyze_spectrum(assemble_linearized(eq, MaterialParams{}, 128));
    double up = 0;
    for (const auto& z : s.eigenvalues) up = std::max(up, -z.real());
    ok = ok && up <= 1e-7 * s.norm && s.max_abs_imag <= 1e-8 * s.norm && s.kernel_dim == 3 * m &&
         s.rank == s.rank_squared;
    text += "m=" + std::to_string(m) + ": kernel " + std::to_string(s.kernel_dim) + " rank " +
            std::to_string(s.rank) + "/" + std::to_string(s.rank_squared) + " maxRe(-L)/|L| " +
            num(up / s.norm) + " maxIm/|L| " + num(s.max_abs_imag / s.norm) + "; ";
  }
  report(7, "normal stability: Re(-L) <= 1e-7|L|, Im <= 1e-8|L|, kernel 3m, semisimple", ok, text);
}

void a_sigma() {
  double worst = 0;
  for (double R : {1.0, 1.5}) {
    const int M = 128;
    const Eigen::MatrixXd A = a_sigma_matrix(R, M);
    for (int k = 0; k <= 16; ++k) {
      long double symbol = 0;
      for (int d = 0; d < M; ++d)
        symbol += static_cast<long double>(A(d, 0)) *
                  std::cos(2 * std::numbers::pi_v<long double> * k * d / M);
      worst = std::max(worst, std::abs(double(symbol) - (k * k - 1.0) / (R * R)));
    }
  }
  report(8, "A multipliers (k^2-1)/R^2 to 1e-12, k <= 16", worst <= 1e-12, num(worst));
}

void second_var(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  const MaterialParams mat;
  const EquilibriumConfig one{{Circle{{0, 0}, 1.0}}};
  const EquilibriumConfig two{{Circle{{0, 0}, 1.0}, Circle{{5, 0}, 1.5}}};
  double lowest = INFINITY;
  bool constraints = true;
  for (int t = 0; t < 500; ++t) {
    const EquilibriumConfig& eq = t % 2 ? two : one;
    Perturbation z;
    z.velocity_norm_sq = std::abs(n(rng));
    z.thermal = Eigen::VectorXd(5);
    for (int i = 0; i < 5; ++i) z.thermal[i] = n(rng);
    z.thermal[0] = 0.0;  // (kE) with ∫h_k = 0
    for (std::size_t k = 0; k < eq.circles.size(); ++k) {
      Eigen::VectorXd h(17);
      for (int i = 0; i < 17; ++i) h[i] = n(rng);
      h[0] = 0.0;  // (kM)
      z.heights.push_back(h);
    }
    const auto sv = second_variation(eq, z, mat, 1.0);
    constraints = constraints && sv.constraints_satisfied;
    lowest = std::min(lowest, sv.value);
  }
  Perturbation trans;
  trans.heights = {Eigen::VectorXd::Zero(5)};
  trans.heights[0][1] = 1.0;
  const double deg1 = std::abs(second_variation(one, trans, mat, 1.0).value);

  // Independent quadrature of −σ∫((1+∂²)h)h dθ for h = cos 2θ.
  const int Q = 4096;
  double oracle = 0;
  for (int j = 0; j < Q; ++j) {
    const double th = 2 * pi * j / Q;
    const double h = std::cos(2 * th), hpp = -4 * std::cos(2 * th);
    oracle -= (h + hpp) * h * (2 * pi / Q);
  }
  Perturbation c2;
  c2.heights = {Eigen::VectorXd::Zero(5)};
  c2.heights[0][3] = 1.0;
  const double v2 = second_variation(one, c2, mat, 1.0).value;
  const bool ok = constraints && lowest >= -1e-10 && deg1 <= 1e-10 &&
                  std::abs(v2 - oracle) <= 1e-10 && std::abs(v2 - 3 * pi) <= 1e-10;
  report(9, "second variation >= -1e-10 on (kM)+(kE); 0 on degree one; cos2 = 3 pi sigma", ok,
         "min " + num(lowest) + " deg1 " + num(deg1) + " cos2 err " + num(std::abs(v2 - oracle)));
}

void thermal() {
  ThermalConfig cfg;
  cfg.materials.d1 = 2.0;
  cfg.materials.d2 = 0.5;
  cfg.materials.rho_kappa1 = 3.0;
  cfg.inner_points = cfg.outer_points = 64;
  const ThermalModes coarse = thermal_modes(cfg, 6);
  cfg.inner_points = cfg.outer_points = 128;
  const ThermalModes fine = thermal_modes(cfg, 6);
  const double lam0 = std::abs((4 * fine.eigenvalues[0] - coarse.eigenvalues[0]) / 3);
  const Eigen::VectorXd c = fine.modes.col(0);
  const double flat = (c.array() - c[0]).abs().maxCoeff();
  double rest = -INFINITY;
  for (std::size_t i = 1; i < fine.eigenvalues.size(); ++i) rest = std::max(rest, fine.eigenvalues[i]);

  // J₁ zeros by bisection; Neumann at R_out = 2 gives λ = −(j/2)².
  std::vector<double> zeros;
  for (double a = 1.0; zeros.size() < 3; a += 0.05) {
    double lo = a, hi = a + 0.05;
    if (std::cyl_bessel_j(1.0, lo) * std::cyl_bessel_j(1.0, hi) > 0) continue;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (std::cyl_bessel_j(1.0, lo) * std::cyl_bessel_j(1.0, mid) <= 0 ? hi : lo) = mid;
    }
    zeros.push_back(0.5 * (lo + hi));
  }
  ThermalConfig matched;
  std::vector<double> prev;
  double order = INFINITY;
  for (int N : {32, 64, 128}) {
    matched.inner_points = matched.outer_points = N;
    const auto ev = thermal_spectrum(matched, 4);
    std::vector<double> e;
    for (int j = 0; j < 3; ++j) e.push_back(std::abs(ev[j + 1] + std::pow(zeros[j] / 2.0, 2)));
    if (!prev.empty())
      for (int j = 0; j < 3; ++j) order = std::min(order, std::log2(prev[j] / e[j]));
    prev = e;
  }
  // Order 2 to three significant figures; the estimate approaches 2 from below.
  const bool ok = lam0 <= 1e-8 && flat <= 1e-8 && rest <= 0.0 && order >= 1.995;
  report(10, "thermal: lambda_0 = 0 (1e-8), constant mode, rest <= 0, order >= 1.995", ok,
         "|lambda_0| " + num(lam0) + " mode dev " + num(flat) + " max rest " + num(rest) +
             " order " + num(order));
}

void geometry(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double gb = 0;
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(21);
    c[0] = 1.5 + 0.5 * u(rng);
    for (int k = 1; k <= 10; ++k) c[2 * k - 1] = 0.25 * u(rng) / (k * k), c[2 * k] = 0.25 * u(rng) / (k * k);
    Interfaced iface({StarCurved({0, 0}, c, 256), StarCurved::circle({6, 0}, 0.5 + (u(rng) + 1), 256)});
    for (const auto& comp : iface.components())
      gb = std::max(gb, std::abs(curvature(comp).dot(comp.weights()) + 2 * pi));
  }
  double hz = 0;
  for (int t = 0; t < 1000; ++t) {
    const double R = 1.0 + 0.5 * u(rng);
    const double y0 = 0.3 * R * u(rng);
    const Eigen::Vector2d y = 0.3 * R * Eigen::Vector2d(u(rng), u(rng));
    const double th = pi * u(rng);
    const Eigen::Vector2d e(std::cos(th), std::sin(th));
    hz = std::max(hz, std::abs((R * e + hanzawa_delta(R, y0, y, th) * e - y).norm() - (R + y0)));
  }
  bool yl = true;
  for (double R : {0.5, 1.0, 2.0, 3.0})
    for (double s : {0.5, 1.0, 3.0})
      for (int n : {2, 3}) yl = yl && young_laplace_jump(R, s, n) == -s * (n - 1) / R;
  report(11, "Gauss-Bonnet to 1e-8; Hanzawa round trip to 1e-12; Young-Laplace exact",
         gb <= 1e-8 && hz <= 1e-12 && yl,
         "GB " + num(gb) + " Hanzawa " + num(hz) + " YL " + (yl ? "exact" : "mismatch"));
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void determinism() {
  const Config cfg = load_config(TPSTOKES_SHORT_RELAX_CFG);
  const fs::path base = fs::temp_directory_path() / "tpstokes_acceptance";
  fs::remove_all(base);
  std::ostringstream log;
  const auto a = run_experiment(cfg, base / "a", log);
  const auto b = run_experiment(cfg, base / "b", log);
  bool same = a.exit_code == 0 && b.exit_code == 0 && a.files.size() == b.files.size();
  for (std::size_t i = 0; same && i < a.files.size(); ++i)
    same = slurp(a.files[i]) == slurp(b.files[i]);
  report(12, "identical runs produce byte-identical outputs", same,
         std::to_string(a.files.size()) + " files compared");
}

}  // namespace

int main() {
  std::mt19937_64 rng(20240601);
  ntd_properties(rng);
  relaxation();
  normal_stability();
  a_sigma();
  second_var(rng);
  thermal();
  geometry(rng);
  determinism();
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
