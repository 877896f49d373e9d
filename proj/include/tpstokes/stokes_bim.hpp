#pragma once

// Neumann-to-Dirichlet map of the stationary two-phase Stokes problem in the
// free plane, realized with the 2D Stokeslet single-layer potential.
//
// For a normal traction jump g the force density on the fluid is g·ν and the
// interface velocity is
//
//   u(x) = 1/(4πμ) ∮ [ −log(|x−y|/ℓ) I + (x−y)⊗(x−y)/|x−y|² ] g(y) ν(y) dΓ_y,
//
// and N g = (u|ν) at the nodes. The length ℓ fixes the additive constant of
// the 2D logarithm (the stand-in for a far container wall). It only affects
// densities with a net force; every g built from the curvature is force free.

#include <vector>

#include <Eigen/Core>

#include "tpstokes/geometry.hpp"

namespace tpstokes {

/// All interface nodes concatenated component by component.
struct CollocationGrid {
  Eigen::Matrix2Xd nodes;
  Eigen::Matrix2Xd normals;
  Eigen::VectorXd speeds;   ///< |x'(θ)| per node
  Eigen::VectorXd weights;  ///< arc-length quadrature weights
  Eigen::VectorXd curvature;
  std::vector<int> component_index;
  std::vector<int> offsets;  ///< component k owns [offsets[k], offsets[k+1])

  static CollocationGrid build(const Interfaced& iface);

  int size() const { return static_cast<int>(weights.size()); }
  int components() const { return static_cast<int>(offsets.size()) - 1; }
  int nodes_in(int k) const { return offsets[k + 1] - offsets[k]; }

  /// e_k: one on component k, zero elsewhere.
  Eigen::VectorXd indicator(int k) const;

  /// Largest node spacing on component k.
  double spacing(int k) const;
};

class NtDOperator {
 public:
  NtDOperator(Eigen::MatrixXd matrix, CollocationGrid grid, double mu1,
              double mu2, double gauge_length)
      : matrix_(std::move(matrix)),
        grid_(std::move(grid)),
        mu1_(mu1),
        mu2_(mu2),
        gauge_length_(gauge_length) {}

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const CollocationGrid& grid() const { return grid_; }
  double mu1() const { return mu1_; }
  double mu2() const { return mu2_; }
  double gauge_length() const { return gauge_length_; }

  /// ½(WN + (WN)ᵀ) with W = diag(weights).
  Eigen::MatrixXd weighted_form() const;

 private:
  Eigen::MatrixXd matrix_;
  CollocationGrid grid_;
  double mu1_;
  double mu2_;
  double gauge_length_;
};

struct AssemblyOptions {
  /// ≤ 0 picks twice the bounding-box diagonal of the interface.
  double gauge_length = 0.0;
  /// ≤ 0 reads TPSTOKES_THREADS, falling back to hardware concurrency.
  int threads = 0;
};

/// Assembles N on the nodes of `iface`. A positive `nodes_per_component`
/// resamples every component on that many nodes first. Matched viscosities
/// use the single layer directly; μ₁ ≠ μ₂ solves the second-kind interface
/// equation with the Stokes double layer.
NtDOperator assemble_ntd(const Interfaced& iface, const MaterialParams& materials,
                         int nodes_per_component = 0,
                         const AssemblyOptions& options = {});

Eigen::VectorXd apply_ntd(const NtDOperator& op, const Eigen::VectorXd& g);

/// (Ng|g)_W, the discrete 2∫μ|D(u)|².
double dissipation(const NtDOperator& op, const Eigen::VectorXd& g);

/// (g|h)_W.
double weighted_inner(const CollocationGrid& grid, const Eigen::VectorXd& g,
                      const Eigen::VectorXd& h);

/// g minus its weighted mean on each component. N is blind to the removed
/// part, so N(g) = N(remove_component_means(g)) while the latter avoids
/// round-off from large constant parts.
Eigen::VectorXd remove_component_means(const CollocationGrid& grid,
                                       const Eigen::VectorXd& g);

/// Velocity of the Stokes flow driven by the traction jump g, evaluated at
/// points at least three node spacings away from the interface.
Eigen::Matrix2Xd velocity_field(const Interfaced& iface,
                                const MaterialParams& materials,
                                const Eigen::VectorXd& g,
                                const Eigen::Matrix2Xd& query_points,
                                const AssemblyOptions& options = {});

/// Thread count used for row-parallel assembly.
int assembly_threads(int requested = 0);

/// Rebuilds every component with `nodes_per_component` nodes (no-op for ≤ 0).
Interfaced resample(const Interfaced& iface, int nodes_per_component);

}  // namespace tpstokes
