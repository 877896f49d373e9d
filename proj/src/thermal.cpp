// Mode-0 radial heat transmission problem on (0, R) ∪ (R, R_out):
//   ϱκ λ ϑ = d (ϑ'' + ϑ'/r),  ⟦ϑ⟧ = ⟦d ϑ'⟧ = 0 at r = R,  ϑ'(R_out) = 0.
//
// Vertex-centred conservative differences with a node on r = R. Each row is
// a flux balance over the control volume [r_{i-1/2}, r_{i+1/2}] with the
// r-weighted measure; the row at r = R balances d₁ϑ'(R⁻) against d₂ϑ'(R⁺),
// the row at r = 0 has no inner face, and the last row has no outer face.
// The stiffness matrix is symmetric and annihilates constants, and the mass
// matrix is diagonal, so λ = −eig(M^{-1/2} K M^{-1/2}).

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "tpstokes/spectra.hpp"

namespace tpstokes {

void ThermalConfig::validate() const {
  materials.validate();
  if (!(R > 0) || !(R_out > R)) throw std::invalid_argument("thermal: need 0 < R < R_out");
  if (inner_points < 16 || outer_points < 16)
    throw std::invalid_argument("thermal: grid too coarse (need >= 16 points per region)");
}

ThermalModes thermal_modes(const ThermalConfig& cfg, int n_eigs) {
  cfg.validate();
  const int N1 = cfg.inner_points, N2 = cfg.outer_points;
  const int n = N1 + N2 + 1;
  Eigen::VectorXd r(n);
  for (int i = 0; i <= N1; ++i) r[i] = cfg.R * i / N1;
  for (int j = 1; j <= N2; ++j) r[N1 + j] = cfg.R + (cfg.R_out - cfg.R) * j / N2;

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    const bool inner = i < N1;
    const double d = inner ? cfg.materials.d1 : cfg.materials.d2;
    const double rk = inner ? cfg.materials.rho_kappa1 : cfg.materials.rho_kappa2;
    const double mid = 0.5 * (r[i] + r[i + 1]);
    const double c = d * mid / (r[i + 1] - r[i]);
    K(i, i) += c;
    K(i + 1, i + 1) += c;
    K(i, i + 1) -= c;
    K(i + 1, i) -= c;
    // ∫ r dr over each half interval.
    mass[i] += rk * 0.5 * (mid * mid - r[i] * r[i]);
    mass[i + 1] += rk * 0.5 * (r[i + 1] * r[i + 1] - mid * mid);
  }

  const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd S = inv_sqrt.asDiagonal() * K * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("thermal: symmetric eigen-solver did not converge");

  // Eigenvalues of S ascend, so λ = −eig descends.
  const int count = std::clamp(n_eigs, 1, n);
  ThermalModes out;
  out.radii = r;
  out.modes.resize(n, count);
  for (int k = 0; k < count; ++k) {
    out.eigenvalues.push_back(-es.eigenvalues()[k]);
    Eigen::VectorXd v = inv_sqrt.asDiagonal() * es.eigenvectors().col(k);
    v /= v.cwiseAbs().maxCoeff();
    out.modes.col(k) = v;
  }
  return out;
}

std::vector<double> thermal_spectrum(const ThermalConfig& config, int n_eigs) {
  return thermal_modes(config, n_eigs).eigenvalues;
}

}  // namespace tpstokes
