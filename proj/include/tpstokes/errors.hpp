#pragma once

#include <stdexcept>
#include <string>

namespace tpstokes {

/// Input violates a geometric invariant (non-star-shaped radius, overlapping
/// components, degenerate target circle).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two interface components (or a query point and the interface) are too
/// close for the quadrature to be trusted.
class NearContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The time integrator could not find an acceptable step.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An eigen-iteration failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tpstokes
