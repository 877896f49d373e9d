#pragma once

// Time integration of the surface-tension driven flow V = σ N H.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tpstokes/geometry.hpp"
#include "tpstokes/stokes_bim.hpp"

namespace tpstokes {

enum class Scheme { RK4, ForwardEuler };

struct SimulationState {
  double t = 0.0;
  Interfaced interface;
  double dt = 1e-3;
  long step_index = 0;
};

struct LedgerRow {
  double t = 0.0;
  double area = 0.0;  ///< total interface length |Γ|
  std::vector<double> volumes;
  double dissipation = 0.0;  ///< (N H|H)_W
  double max_v = 0.0;
  double reach = 0.0;
  double deficit = 0.0;  ///< Σ_k isoperimetric deficit of component k
  /// Change of |Γ| since the previous row, accumulated step by step in a
  /// cancellation-free form. Zero on the first row.
  double area_change = 0.0;
};

/// Normal velocity together with the quantities it was built from.
struct FlowEvaluation {
  CollocationGrid grid;
  Eigen::VectorXd curvature;
  Eigen::VectorXd velocity;
  double dissipation = 0.0;  ///< (N H|H)_W
};

FlowEvaluation evaluate_flow(const Interfaced& iface, const MaterialParams& materials,
                             const AssemblyOptions& options = {});

/// V = σ N H at the nodes; `nodes_per_component` > 0 resamples first.
Eigen::VectorXd normal_velocity(const Interfaced& iface, const MaterialParams& materials,
                                int nodes_per_component = 0,
                                const AssemblyOptions& options = {});

struct StepOptions {
  Scheme scheme = Scheme::RK4;
  double reach_floor = 0.0;
  double reach_cap = 10.0;
  int max_retries = 10;
  /// Relative slack on the area-increase test; |Γ| is only known to a few
  /// ulps.
  double area_slack = 64.0 * std::numeric_limits<double>::epsilon();
  bool rescale_volume = false;
  std::vector<double> target_volumes;  ///< used when rescale_volume is set
  AssemblyOptions assembly;
};

struct StepResult {
  SimulationState state;
  double dt_used = 0.0;
  int rejections = 0;
  double area_change = 0.0;  ///< |Γ(t+dt)| − |Γ(t)|, cancellation free
};

/// Advances the radius coefficients by ∂_t ρ = V √(ρ²+ρ'²)/ρ. Rejected steps
/// (area increase, reach below floor, lost star shape) are retried with half
/// the step; StiffnessError after `max_retries`.
StepResult step(const SimulationState& state, double dt, const MaterialParams& materials,
                const StepOptions& options = {});

/// Rate of change of the radius coefficients of every component.
std::vector<Eigen::VectorXd> radius_tendency(const Interfaced& iface,
                                             const MaterialParams& materials,
                                             const AssemblyOptions& options = {});

/// Zeroes modes above ⌊2K/3⌋.
Eigen::VectorXd dealias(Eigen::VectorXd coeffs);

/// Same curve described around a new center.
StarCurved recenter(const StarCurved& curve, const Eigen::Vector2d& new_center);

struct RunConfig {
  Interfaced initial;
  MaterialParams materials;
  double dt = 1e-3;
  double t_max = 50.0;
  double equilibrium_tol = 1e-8;
  int cadence = 10;  ///< ledger row every `cadence` accepted steps
  double reach_floor = 1e-3;
  double reach_cap = 10.0;
  Scheme scheme = Scheme::RK4;
  bool rescale_volume = false;
  /// Recenter a component once its centroid drifts this far (relative to
  /// a₀) from the expansion center.
  double recenter_threshold = 1e-2;
  AssemblyOptions assembly;
};

enum class RunStatus { Converged, TimeLimit, GeometryAbort, RegularityAbort };

std::string to_string(RunStatus s);

struct RunResult {
  std::vector<LedgerRow> ledger;
  SimulationState final_state;
  RunStatus status = RunStatus::TimeLimit;
  std::string message;
  long rejections = 0;
  /// Largest per-step change of |Γ| relative to |Γ| over accepted steps.
  double max_step_area_change = -std::numeric_limits<double>::infinity();
};

/// Evolves until max |V| < equilibrium_tol or t > t_max. Solver failures are
/// reported through `status` with the last valid ledger row kept.
RunResult run(const RunConfig& config,
              const std::function<void(const LedgerRow&)>& on_row = {});

LedgerRow ledger_row(const SimulationState& state, const MaterialParams& materials,
                     double reach_cap = 10.0, const AssemblyOptions& options = {});

struct DecayFit {
  double rate = 0.0;      ///< λ̂ with values ≈ C e^{−λ̂ t}
  double residual = 0.0;  ///< RMS of the log-linear fit
  int samples = 0;
};

/// Least-squares slope of log(values) against t.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values);

bool detect_equilibrium(const SimulationState& state, const MaterialParams& materials,
                        double tol, const AssemblyOptions& options = {});

}  // namespace tpstokes
