#include "tpstokes/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/QR>

namespace tpstokes {

namespace {

std::vector<Eigen::VectorXd> coefficients(const Interfaced& iface) {
  std::vector<Eigen::VectorXd> c;
  for (const auto& comp : iface.components()) c.push_back(comp.coeffs());
  return c;
}

// Throws GeometryError if the new coefficients leave the admissible set.
Interfaced with_coefficients(const Interfaced& iface,
                             const std::vector<Eigen::VectorXd>& coeffs) {
  std::vector<StarCurved> comps;
  comps.reserve(iface.size());
  for (std::size_t k = 0; k < iface.size(); ++k)
    comps.push_back(iface[k].with_coeffs(coeffs[k]));
  return Interfaced(std::move(comps));
}

std::vector<Eigen::VectorXd> axpy(const std::vector<Eigen::VectorXd>& y, double a,
                                  const std::vector<Eigen::VectorXd>& k) {
  std::vector<Eigen::VectorXd> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

double total_length(const Interfaced& iface) {
  double L = 0.0;
  for (const auto& c : iface.components()) L += arc_length(c);
  return L;
}

// |Γ_new| − |Γ_old| for two curves on the same grid, written as
// Σ h (Δρ(ρ+ρ̃) + Δρ'(ρ'+ρ̃'))/(s+s̃) so that no large terms cancel.
double length_change(const StarCurved& before, const StarCurved& after) {
  const int M = before.node_count();
  const Eigen::VectorXd dc = after.coeffs() - before.coeffs();
  const Eigen::VectorXd drho = StarCurved::evaluate_series(dc, M, 0);
  const Eigen::VectorXd ddrho = StarCurved::evaluate_series(dc, M, 1);
  const Eigen::VectorXd r0 = before.radius_at_nodes(), r1 = after.radius_at_nodes();
  const Eigen::VectorXd d0 = before.radius_at_nodes(1), d1 = after.radius_at_nodes(1);
  const Eigen::VectorXd s0 = before.speeds(), s1 = after.speeds();
  const double h = 2.0 * std::numbers::pi / M;
  double acc = 0.0;
  for (int j = 0; j < M; ++j)
    acc += (drho[j] * (r0[j] + r1[j]) + ddrho[j] * (d0[j] + d1[j])) / (s0[j] + s1[j]);
  return h * acc;
}

double length_change(const Interfaced& before, const Interfaced& after) {
  double d = 0.0;
  for (std::size_t k = 0; k < before.size(); ++k) {
    if (before[k].center() != after[k].center())
      d += arc_length(after[k]) - arc_length(before[k]);
    else
      d += length_change(before[k], after[k]);
  }
  return d;
}

Interfaced rescale_volumes(const Interfaced& iface, const std::vector<double>& target) {
  std::vector<Eigen::VectorXd> c = coefficients(iface);
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] *= std::sqrt(target[k] / enclosed_area(iface[k]));
  return with_coefficients(iface, c);
}

}  // namespace

FlowEvaluation evaluate_flow(const Interfaced& iface, const MaterialParams& materials,
                             const AssemblyOptions& options) {
  NtDOperator op = assemble_ntd(iface, materials, 0, options);
  FlowEvaluation out;
  out.curvature = op.grid().curvature;
  const Eigen::VectorXd dH = remove_component_means(op.grid(), out.curvature);
  const Eigen::VectorXd NH = apply_ntd(op, dH);
  out.velocity = materials.sigma * NH;
  out.dissipation = weighted_inner(op.grid(), NH, dH);
  out.grid = op.grid();
  return out;
}

Eigen::VectorXd normal_velocity(const Interfaced& iface, const MaterialParams& materials,
                                int nodes_per_component, const AssemblyOptions& options) {
  return evaluate_flow(resample(iface, nodes_per_component), materials, options).velocity;
}

Eigen::VectorXd dealias(Eigen::VectorXd coeffs) {
  const int K = static_cast<int>(coeffs.size() - 1) / 2;
  const int keep = (2 * K) / 3;
  for (int k = keep + 1; k <= K; ++k) {
    coeffs[2 * k - 1] = 0.0;
    coeffs[2 * k] = 0.0;
  }
  return coeffs;
}

std::vector<Eigen::VectorXd> radius_tendency(const Interfaced& iface,
                                             const MaterialParams& materials,
                                             const AssemblyOptions& options) {
  const FlowEvaluation flow = evaluate_flow(iface, materials, options);
  std::vector<Eigen::VectorXd> rates;
  for (std::size_t k = 0; k < iface.size(); ++k) {
    const auto& c = iface[k];
    const int off = flow.grid.offsets[k];
    const int M = c.node_count();
    const Eigen::VectorXd rho = c.radius_at_nodes();
    const Eigen::VectorXd rate = (flow.velocity.segment(off, M).array() *
                                  flow.grid.speeds.segment(off, M).array() / rho.array())
                                     .matrix();
    rates.push_back(dealias(StarCurved::project_samples(rate, c.modes())));
  }
  return rates;
}

StarCurved recenter(const StarCurved& curve, const Eigen::Vector2d& new_center) {
  const int M = curve.node_count();
  const Eigen::Vector2d shift = curve.center() - new_center;
  Eigen::VectorXd samples(M);
  for (int j = 0; j < M; ++j) {
    const double th = curve.theta(j);
    const Eigen::Vector2d e(std::cos(th), std::sin(th));
    // Solve e × (shift + ρ(φ)e(φ)) = 0 for φ by Newton.
    double phi = th;
    for (int it = 0; it < 50; ++it) {
      const double r = curve.radius(phi), dr = curve.radius(phi, 1);
      const Eigen::Vector2d ep(std::cos(phi), std::sin(phi)), et(-std::sin(phi), std::cos(phi));
      const Eigen::Vector2d p = shift + r * ep;
      const Eigen::Vector2d dp = dr * ep + r * et;
      const double f = e[0] * p[1] - e[1] * p[0];
      const double df = e[0] * dp[1] - e[1] * dp[0];
      const double delta = f / df;
      phi -= delta;
      if (std::abs(delta) < 1e-15) break;
    }
    const Eigen::Vector2d p =
        shift + curve.radius(phi) * Eigen::Vector2d(std::cos(phi), std::sin(phi));
    samples[j] = e.dot(p);
  }
  return StarCurved(new_center, dealias(StarCurved::project_samples(samples, curve.modes())),
                    M);
}

StepResult step(const SimulationState& state, double dt, const MaterialParams& materials,
                const StepOptions& options) {
  if (!(dt > 0)) throw std::invalid_argument("step: dt must be > 0");
  const auto y = coefficients(state.interface);
  const double L0 = total_length(state.interface);
  std::string last_reason;
  double h = dt;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt, h *= 0.5) {
    try {
      std::vector<Eigen::VectorXd> next;
      const auto f = [&](const std::vector<Eigen::VectorXd>& c) {
        return radius_tendency(with_coefficients(state.interface, c), materials,
                               options.assembly);
      };
      const auto k1 = f(y);
      if (options.scheme == Scheme::ForwardEuler) {
        next = axpy(y, h, k1);
      } else {
        const auto k2 = f(axpy(y, 0.5 * h, k1));
        const auto k3 = f(axpy(y, 0.5 * h, k2));
        const auto k4 = f(axpy(y, h, k3));
        next.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
          next[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      Interfaced moved = with_coefficients(state.interface, next);
      if (options.rescale_volume) moved = rescale_volumes(moved, options.target_volumes);
      const double dL = length_change(state.interface, moved);
      if (dL > options.area_slack * L0) {
        std::ostringstream os;
        os << "interface length increased by " << dL << " at dt " << h;
        last_reason = os.str();
        continue;
      }
      if (options.reach_floor > 0) {
        const double reach = ball_condition_radius(moved, options.reach_cap);
        if (reach < options.reach_floor) {
          std::ostringstream os;
          os << "reach " << reach << " below floor " << options.reach_floor << " at dt " << h;
          last_reason = os.str();
          continue;
        }
      }
      SimulationState out{state.t + h, std::move(moved), state.dt, state.step_index + 1};
      return StepResult{std::move(out), h, attempt, dL};
    } catch (const GeometryError& e) {
      last_reason = std::string("stage left the admissible set: ") + e.what();
    }
  }
  std::ostringstream os;
  os << "step rejected " << options.max_retries + 1 << " times at t = " << state.t
     << " (last: " << last_reason << ")";
  throw StiffnessError(os.str());
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::TimeLimit: return "time-limit";
    case RunStatus::GeometryAbort: return "geometry";
    case RunStatus::RegularityAbort: return "regularity";
  }
  return "unknown";
}

LedgerRow ledger_row(const SimulationState& state, const MaterialParams& materials,
                     double reach_cap, const AssemblyOptions& options) {
  const FlowEvaluation flow = evaluate_flow(state.interface, materials, options);
  LedgerRow row;
  row.t = state.t;
  row.area = total_length(state.interface);
  for (const auto& c : state.interface.components()) {
    row.volumes.push_back(enclosed_area(c));
    row.deficit += isoperimetric_deficit(c);
  }
  row.dissipation = flow.dissipation;
  row.max_v = flow.velocity.cwiseAbs().maxCoeff();
  row.reach = ball_condition_radius(state.interface, reach_cap);
  return row;
}

RunResult run(const RunConfig& cfg, const std::function<void(const LedgerRow&)>& on_row) {
  cfg.materials.validate();
  if (!(cfg.dt > 0) || !(cfg.t_max >= 0) || cfg.cadence < 1)
    throw std::invalid_argument("run: need dt > 0, t_max >= 0, cadence >= 1");

  RunResult result{{}, SimulationState{0.0, cfg.initial, cfg.dt, 0}, RunStatus::TimeLimit, {}, 0};
  SimulationState& state = result.final_state;

  StepOptions opts;
  opts.scheme = cfg.scheme;
  opts.reach_floor = cfg.reach_floor;
  opts.reach_cap = cfg.reach_cap;
  opts.rescale_volume = cfg.rescale_volume;
  opts.assembly = cfg.assembly;
  for (const auto& c : cfg.initial.components())
    opts.target_volumes.push_back(enclosed_area(c));

  auto emit = [&](LedgerRow row, double change) {
    row.area_change = change;
    result.ledger.push_back(row);
    if (on_row) on_row(result.ledger.back());
    return result.ledger.back().max_v;
  };

  try {
    double max_v = emit(ledger_row(state, cfg.materials, cfg.reach_cap, cfg.assembly), 0.0);
    if (max_v < cfg.equilibrium_tol) {
      result.status = RunStatus::Converged;
      result.message = "initial interface is at equilibrium";
      return result;
    }
    double accumulated = 0.0;
    long since_row = 0;
    double h = cfg.dt;
    while (state.t < cfg.t_max) {
      StepResult s = step(state, std::min(h, cfg.dt), cfg.materials, opts);
      result.rejections += s.rejections;
      accumulated += s.area_change;
      result.max_step_area_change =
          std::max(result.max_step_area_change, s.area_change / total_length(state.interface));
      h = s.rejections > 0 ? s.dt_used : std::min(cfg.dt, 2.0 * s.dt_used);
      state = std::move(s.state);

      // Keep each expansion center near its region's centroid.
      bool moved_center = false;
      std::vector<StarCurved> comps = state.interface.components();
      for (auto& c : comps) {
        const Eigen::Vector2d centroid = region_centroid(c);
        if ((centroid - c.center()).norm() > cfg.recenter_threshold * c.coeffs()[0]) {
          c = recenter(c, centroid);
          moved_center = true;
        }
      }
      if (moved_center) state.interface = Interfaced(std::move(comps));

      if (++since_row == cfg.cadence || state.t >= cfg.t_max) {
        since_row = 0;
        max_v = emit(ledger_row(state, cfg.materials, cfg.reach_cap, cfg.assembly),
                     accumulated);
        accumulated = 0.0;
        if (max_v < cfg.equilibrium_tol) {
          result.status = RunStatus::Converged;
          result.message = "max normal speed below equilibrium tolerance";
          return result;
        }
      }
    }
    result.status = RunStatus::TimeLimit;
    result.message = "t_max reached before equilibrium";
  } catch (const NearContactError& e) {
    result.status = RunStatus::GeometryAbort;
    result.message = std::string("geometry obstruction (uniform ball condition lost: "
                                 "components approach contact): ") + e.what();
  } catch (const GeometryError& e) {
    result.status = RunStatus::GeometryAbort;
    result.message = std::string("geometry obstruction (interface left the star-shaped "
                                 "admissible set): ") + e.what();
  } catch (const StiffnessError& e) {
    const std::string what = e.what();
    if (what.find("reach") != std::string::npos || what.find("admissible") != std::string::npos) {
      result.status = RunStatus::GeometryAbort;
      result.message = "geometry obstruction (uniform ball condition lost: reach below "
                       "floor or star shape lost): " + what;
    } else {
      result.status = RunStatus::RegularityAbort;
      result.message = "regularity obstruction (step control failed): " + what;
    }
  }
  return result;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_decay_rate: size mismatch");
  if (times.size() < 10)
    throw std::invalid_argument("fit_decay_rate: need at least 10 samples");
  const int n = static_cast<int>(times.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    if (!(values[i] > 0))
      throw std::invalid_argument("fit_decay_rate: non-positive value in window");
    A(i, 0) = 1.0;
    A(i, 1) = times[i];
    b[i] = std::log(values[i]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  DecayFit fit;
  fit.rate = -coef[1];
  fit.residual = std::sqrt((A * coef - b).squaredNorm() / n);
  fit.samples = n;
  return fit;
}

bool detect_equilibrium(const SimulationState& state, const MaterialParams& materials,
                        double tol, const AssemblyOptions& options) {
  return evaluate_flow(state.interface, materials, options).velocity.cwiseAbs().maxCoeff() <
         tol;
}

}  // namespace tpstokes
