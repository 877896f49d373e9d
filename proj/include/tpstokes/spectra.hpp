#pragma once

// Linear stability at equilibria: the curvature linearization A, the flow
// linearization L = σ N A, the constrained second variation of the entropy,
// and the radial thermal transmission eigenproblem.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tpstokes/geometry.hpp"

namespace tpstokes {

/// (mode k, eigenvalue (k² − 1)/R²) for k = 0..k_max.
std::vector<std::pair<int, double>> a_sigma_eigenvalues(double R, int k_max);

/// −(1/R²) − Δ on the circle of radius R as a dense matrix acting on M nodal
/// values (a real circulant).
Eigen::MatrixXd a_sigma_matrix(double R, int M);

/// σ N A on the multi-circle grid with M nodes per circle.
Eigen::MatrixXd assemble_linearized(const EquilibriumConfig& config,
                                    const MaterialParams& materials, int M);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  ///< ascending real part
  int kernel_dim = 0;
  bool kernel_stable = true;  ///< same count at threshold ×10 and ÷10
  bool semisimple = false;
  double spectral_gap = 0.0;
  double zero_threshold = 0.0;  ///< absolute threshold actually used
  int resolution = 0;
  int rank = 0;
  int rank_squared = 0;
  double max_abs_imag = 0.0;
  double norm = 0.0;  ///< spectral norm of L
};

inline constexpr double kDefaultZeroThreshold = 1e-7;

/// Eigen-decomposition and kernel analysis. `relative_threshold` is scaled by
/// the largest |eigenvalue|; `resolution` defaults to the matrix size.
SpectrumReport analyze_spectrum(const Eigen::MatrixXd& L,
                                double relative_threshold = kDefaultZeroThreshold,
                                int resolution = 0);

/// z = (v, ϑ, h₁…h_m) at an equilibrium of circles.
struct Perturbation {
  double velocity_norm_sq = 0.0;  ///< ∫ ϱ|v|²
  /// Coefficients of ϑ in an orthonormal basis of L₂(Ω; ϱκ dx) whose first
  /// element is the normalized constant.
  Eigen::VectorXd thermal;
  /// Fourier coefficients (a₀, a₁, b₁, …) of h_k per circle.
  std::vector<Eigen::VectorXd> heights;
};

struct SecondVariationOptions {
  double energy_jump = 0.0;    ///< ⟦ϱε(θ_*)⟧
  double heat_capacity = 1.0;  ///< ∫_Ω ϱκ dx
  double tolerance = 1e-10;
};

struct SecondVariation {
  double value = 0.0;
  bool constraints_satisfied = false;
  std::vector<double> mass_residuals;  ///< ∫ h_k dΓ_k
  double energy_residual = 0.0;
};

/// −θ_*⟨D(e)z|z⟩ evaluated exactly on Fourier modes.
SecondVariation second_variation(const EquilibriumConfig& config, const Perturbation& z,
                                 const MaterialParams& materials, double theta_star,
                                 const SecondVariationOptions& options = {});

struct ThermalConfig {
  double R = 1.0;
  double R_out = 2.0;
  MaterialParams materials;
  int inner_points = 64;  ///< intervals on (0, R)
  int outer_points = 64;  ///< intervals on (R, R_out)

  void validate() const;
};

struct ThermalModes {
  std::vector<double> eigenvalues;  ///< descending, first ≈ 0
  Eigen::MatrixXd modes;            ///< one column per eigenvalue
  Eigen::VectorXd radii;
};

ThermalModes thermal_modes(const ThermalConfig& config, int n_eigs);

/// The n_eigs largest eigenvalues of the mode-0 radial transmission problem.
std::vector<double> thermal_spectrum(const ThermalConfig& config, int n_eigs);

}  // namespace tpstokes
