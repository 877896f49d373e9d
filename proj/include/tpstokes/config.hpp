#pragma once

// Sectioned key = value run configuration.
//
//   # comment
//   [run]
//   mode = simulate            # simulate | spectrum | thermal | verify
//   [geometry]
//   circle = cx cy R           # repeatable
//   curve = cx cy a0 a1 b1 ... # repeatable, radius Fourier coefficients
//   [materials]
//   sigma = 1  mu1 = 1  mu2 = 1  rho_kappa1 = 1  rho_kappa2 = 1  d1 = 1  d2 = 1
//   [numerics]
//   nodes = 128  modes = 0 (0: nodes/4 - 1)  dt = 1e-3  t_max = 50
//   equilibrium_tol = 1e-8  cadence = 10  scheme = rk4|euler
//   reach_floor = 1e-3  reach_cap = 10  rescale_volume = false
//   zero_threshold = 1e-7  threads = 0
//   [thermal]
//   R = 1  R_out = 2  inner_points = 64  outer_points = 64  eigenvalues = 8
//   [verify]
//   suite = prop71|normal-stability|conservation|convergence|thermal|geometry|all
//   [output]
//   directory = out  svg = true

#include <stdexcept>
#include <string>
#include <vector>

#include "tpstokes/evolution.hpp"
#include "tpstokes/geometry.hpp"

namespace tpstokes {

enum class Mode { Simulate, Spectrum, Thermal, Verify };

std::string to_string(Mode m);

struct ComponentSpec {
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::VectorXd coeffs;  ///< (a₀, a₁, b₁, …); a circle has a single entry
  int line = 0;
  bool is_circle() const;
};

struct NumericsSettings {
  int nodes = 128;
  int modes = 0;
  double dt = 1e-3;
  double t_max = 50.0;
  double equilibrium_tol = 1e-8;
  int cadence = 10;
  Scheme scheme = Scheme::RK4;
  double reach_floor = 1e-3;
  double reach_cap = 10.0;
  bool rescale_volume = false;
  double zero_threshold = 1e-7;
  int threads = 0;

  int effective_modes() const { return modes > 0 ? modes : nodes / 4 - 1; }
};

struct ThermalSettings {
  double R = 1.0;
  double R_out = 2.0;
  int inner_points = 64;
  int outer_points = 64;
  int eigenvalues = 8;
};

struct OutputSettings {
  std::string directory = "out";
  bool svg = true;
};

struct Config {
  Mode mode = Mode::Simulate;
  std::vector<ComponentSpec> components;
  MaterialParams materials;
  NumericsSettings numerics;
  ThermalSettings thermal;
  std::string suite = "all";
  OutputSettings output;

  /// Interface on `numerics.nodes` nodes with effective_modes() modes.
  Interfaced interface() const;
  /// Circles only; throws GeometryError otherwise.
  EquilibriumConfig equilibrium() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates; all problems are collected into one ConfigError.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

}  // namespace tpstokes
