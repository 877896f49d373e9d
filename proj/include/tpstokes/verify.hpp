#pragma once

// Verification suites and the trajectory diagnostics they share with the
// acceptance binary.

#include <string>
#include <vector>

#include "tpstokes/evolution.hpp"
#include "tpstokes/geometry.hpp"

namespace tpstokes {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& name);

std::string format_suite(const SuiteReport& report);

/// ρ = a₀ + ε cos 2θ centred at the origin, K modes, M nodes.
Interfaced perturbed_circle(double epsilon, int M, int K, double a0 = 1.0);

/// Ledger rows [first, last) over which the discrete dissipation identity is
/// checked: the resolved part of the run ends at the first row whose
/// predicted change of |Γ| over one ledger interval drops below
/// `resolution_floor`·|Γ|; the first and last 10% of that span are dropped.
struct RowWindow {
  std::size_t first = 0;
  std::size_t last = 0;
};
RowWindow lyapunov_window(const std::vector<LedgerRow>& rows, double sigma,
                          double resolution_floor = 1e-9);

/// Largest relative mismatch between (|Γ|_{i+1} − |Γ|_i)/Δt and
/// −σ(D_i + D_{i+1})/2 over the window.
double lyapunov_mismatch(const std::vector<LedgerRow>& rows, double sigma, RowWindow window);

/// max_k max_t |vol_k(t) − vol_k(0)|/vol_k(0).
double volume_drift(const std::vector<LedgerRow>& rows);

/// Rows whose deficit lies in [d₀·10^{−(decade+1)}, d₀·10^{−decade}].
DecayFit fit_deficit_decade(const std::vector<LedgerRow>& rows, int decade = 5);

}  // namespace tpstokes
