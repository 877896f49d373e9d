#include "tpstokes/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tpstokes/stokes_bim.hpp"

namespace tpstokes {

std::vector<std::pair<int, double>> a_sigma_eigenvalues(double R, int k_max) {
  if (!(R > 0)) throw std::invalid_argument("a_sigma_eigenvalues: R must be > 0");
  std::vector<std::pair<int, double>> out;
  for (int k = 0; k <= k_max; ++k) out.emplace_back(k, (double(k) * k - 1.0) / (R * R));
  return out;
}

Eigen::MatrixXd a_sigma_matrix(double R, int M) {
  if (M < 4 || M % 2 != 0) throw std::invalid_argument("a_sigma_matrix: M must be even, >= 4");
  // A = (−I − D₂)/R² with D₂ the closed-form Fourier second-derivative matrix.
  // Entries reach O(M²), so they are formed in extended precision and
  // rounded once.
  using ld = long double;
  const ld pi = std::numbers::pi_v<ld>;
  const ld h = 2 * pi / M;
  const ld R2 = ld(R) * ld(R);
  Eigen::VectorXd row(M);
  row[0] = double((pi * pi / (3 * h * h) + ld(1) / 6 - 1) / R2);
  for (int d = 1; d < M; ++d) {
    const ld s = std::sin(ld(0.5) * d * h);
    row[d] = double(((d % 2 == 0) ? ld(1) : ld(-1)) / (2 * s * s * R2));
  }
  Eigen::MatrixXd A(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) A(i, j) = row[(i - j + M) % M];
  return A;
}

Eigen::MatrixXd assemble_linearized(const EquilibriumConfig& config,
                                    const MaterialParams& materials, int M) {
  const Interfaced iface = config.interface(M);
  const NtDOperator op = assemble_ntd(iface, materials);
  const int n = op.grid().size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < config.circles.size(); ++k)
    A.block(op.grid().offsets[k], op.grid().offsets[k], M, M) =
        a_sigma_matrix(config.circles[k].radius, M);
  return materials.sigma * (op.matrix() * A);
}

namespace {

int numerical_rank(const Eigen::VectorXd& singular_values, double threshold) {
  return static_cast<int>((singular_values.array() > threshold).count());
}

}  // namespace

SpectrumReport analyze_spectrum(const Eigen::MatrixXd& L, double relative_threshold,
                                int resolution) {
  if (L.rows() != L.cols() || L.rows() == 0)
    throw std::invalid_argument("analyze_spectrum: matrix must be square and non-empty");
  Eigen::EigenSolver<Eigen::MatrixXd> es(L, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("analyze_spectrum: QR iteration did not converge");

  SpectrumReport rep;
  rep.resolution = resolution > 0 ? resolution : static_cast<int>(L.rows());
  const Eigen::VectorXcd ev = es.eigenvalues();
  rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const auto& a, const auto& b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });

  double max_abs = 0.0;
  for (const auto& z : rep.eigenvalues) {
    max_abs = std::max(max_abs, std::abs(z));
    rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(z.imag()));
  }
  rep.zero_threshold = relative_threshold * max_abs;
  const auto count_zero = [&](double thr) {
    return static_cast<int>(std::count_if(rep.eigenvalues.begin(), rep.eigenvalues.end(),
                                          [thr](const auto& z) { return std::abs(z) <= thr; }));
  };
  rep.kernel_dim = count_zero(rep.zero_threshold);
  rep.kernel_stable = count_zero(10.0 * rep.zero_threshold) == rep.kernel_dim &&
                      count_zero(0.1 * rep.zero_threshold) == rep.kernel_dim;

  rep.spectral_gap = 0.0;
  bool first = true;
  for (const auto& z : rep.eigenvalues) {
    if (std::abs(z) <= rep.zero_threshold) continue;
    if (first || std::abs(z.real()) < rep.spectral_gap) rep.spectral_gap = std::abs(z.real());
    first = false;
  }

  // Semi-simple zero eigenvalue <=> rank(L) = rank(L²).
  const Eigen::VectorXd s1 = Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues();
  const Eigen::VectorXd s2 = Eigen::JacobiSVD<Eigen::MatrixXd>(L * L).singularValues();
  rep.norm = s1.size() > 0 ? s1[0] : 0.0;
  rep.rank = numerical_rank(s1, relative_threshold * s1[0]);
  rep.rank_squared = numerical_rank(s2, relative_threshold * s1[0] * s1[0]);
  rep.semisimple = rep.rank == rep.rank_squared;
  return rep;
}

SecondVariation second_variation(const EquilibriumConfig& config, const Perturbation& z,
                                 const MaterialParams& materials, double theta_star,
                                 const SecondVariationOptions& options) {
  config.validate();
  if (!(theta_star > 0)) throw std::invalid_argument("second_variation: theta_star must be > 0");
  if (z.heights.size() != config.circles.size())
    throw std::invalid_argument("second_variation: one height series per circle required");
  constexpr double pi = std::numbers::pi;
  const double sigma = materials.sigma;

  SecondVariation out;
  out.value = z.velocity_norm_sq;
  if (z.thermal.size() > 0) out.value += z.thermal.squaredNorm() / theta_star;

  double energy_rhs = 0.0;
  for (std::size_t k = 0; k < config.circles.size(); ++k) {
    const double R = config.circles[k].radius;
    const Eigen::VectorXd& h = z.heights[k];
    if (h.size() < 1 || h.size() % 2 == 0)
      throw std::invalid_argument("second_variation: height coefficients need odd length");
    // −σ∫(H'h)h dΓ with H' = 1/R² + Δ: (j² − 1)/R² on mode j, times πR (2πR for j = 0).
    double form = -2.0 * pi / R * h[0] * h[0];
    for (int j = 1; 2 * j < h.size(); ++j)
      form += pi / R * (double(j) * j - 1.0) * (h[2 * j - 1] * h[2 * j - 1] + h[2 * j] * h[2 * j]);
    out.value += sigma * form;

    const double mass = 2.0 * pi * R * h[0];
    out.mass_residuals.push_back(mass);
    const double sigma_H = young_laplace_jump(R, sigma, 2);
    energy_rhs += (options.energy_jump + sigma_H) * mass;
  }
  const double heat = z.thermal.size() > 0 ? z.thermal[0] * std::sqrt(options.heat_capacity) : 0.0;
  out.energy_residual = heat - energy_rhs;

  out.constraints_satisfied = std::abs(out.energy_residual) <= options.tolerance;
  for (double m : out.mass_residuals)
    out.constraints_satisfied = out.constraints_satisfied && std::abs(m) <= options.tolerance;
  return out;
}

}  // namespace tpstokes
