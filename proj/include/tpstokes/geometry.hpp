#pragma once

// Star-shaped interface geometry in the plane.
//
// A component is the curve x(θ) = c + ρ(θ)(cos θ, sin θ) with a truncated
// Fourier radius ρ(θ) = a₀ + Σ_k (a_k cos kθ + b_k sin kθ), sampled on the
// uniform grid θ_j = 2πj/M. The unit normal points out of the enclosed region
// (from the dispersed phase into the continuous phase) and the mean curvature
// is H = -div ν, so a circle of radius R has H = -1/R.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tpstokes/errors.hpp"

namespace tpstokes {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix2X = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

/// Physical constants of the two phases. The thermal entries are only read by
/// the thermal eigen-solver.
struct MaterialParams {
  double sigma = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double rho_kappa1 = 1.0;
  double rho_kappa2 = 1.0;
  double d1 = 1.0;
  double d2 = 1.0;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("materials.") + name +
                                    " must be finite and > 0");
    };
    positive(sigma, "sigma");
    positive(mu1, "mu1");
    positive(mu2, "mu2");
    positive(rho_kappa1, "rho_kappa1");
    positive(rho_kappa2, "rho_kappa2");
    positive(d1, "d1");
    positive(d2, "d2");
  }

  bool matched_viscosity() const { return mu1 == mu2; }
};

namespace detail {

// cos/sin of 2π·i/M for i = 0..M-1; index arithmetic modulo M keeps k·θ_j exact.
template <typename Scalar>
std::pair<VectorX<Scalar>, VectorX<Scalar>> unit_roots(int M) {
  VectorX<Scalar> c(M), s(M);
  const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(M);
  for (int i = 0; i < M; ++i) {
    c[i] = std::cos(step * Scalar(i));
    s[i] = std::sin(step * Scalar(i));
  }
  return {c, s};
}

}  // namespace detail

/// Fourier star curve. Immutable after construction.
template <typename Scalar>
class StarCurve {
 public:
  using Vec2 = Vector2<Scalar>;
  using VecX = VectorX<Scalar>;

  /// `coeffs` is laid out as (a₀, a₁, b₁, a₂, b₂, …, a_K, b_K).
  StarCurve(const Vec2& center, VecX coeffs, int node_count)
      : center_(center), coeffs_(std::move(coeffs)), node_count_(node_count) {
    if (coeffs_.size() < 1 || coeffs_.size() % 2 == 0)
      throw GeometryError("radius coefficients must have odd length 2K+1");
    if (!coeffs_.allFinite() || !center_.allFinite())
      throw GeometryError("non-finite curve data");
    const int K = modes();
    if (node_count_ < 4 * K + 4 || node_count_ < 4)
      throw GeometryError("node count " + std::to_string(node_count_) +
                          " below 4K+4 = " + std::to_string(4 * K + 4));
    const VecX r = radius_at_nodes();
    if (!(r.minCoeff() > Scalar(0)))
      throw GeometryError("radius function is not positive at every node");
  }

  static StarCurve circle(const Vec2& center, Scalar radius, int node_count,
                          int K = 0) {
    VecX c = VecX::Zero(2 * K + 1);
    c[0] = radius;
    return StarCurve(center, std::move(c), node_count);
  }

  /// Least-squares (discrete Fourier) fit of K modes to radius samples taken
  /// on a uniform grid of size samples.size() ≥ 2K+1.
  static StarCurve fit(const Vec2& center, const VecX& samples, int K,
                       int node_count) {
    if (samples.size() < 2 * K + 2) throw GeometryError("too few samples for fit");
    return StarCurve(center, project_samples(samples, K), node_count);
  }

  const Vec2& center() const { return center_; }
  const VecX& coeffs() const { return coeffs_; }
  int modes() const { return static_cast<int>(coeffs_.size() - 1) / 2; }
  int node_count() const { return node_count_; }

  Scalar theta(int j) const {
    return Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(j) /
           Scalar(node_count_);
  }

  /// d^order ρ / dθ^order at an arbitrary angle.
  Scalar radius(Scalar th, int order = 0) const {
    Scalar r = order == 0 ? coeffs_[0] : Scalar(0);
    for (int k = 1; k <= modes(); ++k) {
      const Scalar a = coeffs_[2 * k - 1], b = coeffs_[2 * k];
      const Scalar c = std::cos(Scalar(k) * th), s = std::sin(Scalar(k) * th);
      // d/dθ rotates (cos, sin) -> (-sin, cos) and scales by k.
      Scalar u = a * c + b * s, v = b * c - a * s;
      for (int o = 0; o < order; ++o) {
        const Scalar nu = Scalar(k) * v, nv = -Scalar(k) * u;
        u = nu;
        v = nv;
      }
      r += u;
    }
    return r;
  }

  /// Spectral derivative of order 0..2 of ρ at all nodes.
  VecX radius_at_nodes(int order = 0) const {
    return evaluate_series(coeffs_, node_count_, order);
  }

  /// Derivative of order 0..2 of the trigonometric series `coeffs` on M
  /// uniform nodes. Works for any coefficient vector, not only radii.
  static VecX evaluate_series(const VecX& coeffs, int M, int order = 0) {
    const auto [cs, sn] = detail::unit_roots<Scalar>(M);
    VecX r = VecX::Constant(M, order == 0 ? coeffs[0] : Scalar(0));
    const int K = static_cast<int>(coeffs.size() - 1) / 2;
    for (int k = 1; k <= K; ++k) {
      const Scalar a = coeffs[2 * k - 1], b = coeffs[2 * k];
      if (a == Scalar(0) && b == Scalar(0)) continue;
      const Scalar kk = Scalar(k);
      for (int j = 0; j < M; ++j) {
        const int idx = static_cast<int>((static_cast<long long>(k) * j) % M);
        const Scalar c = cs[idx], s = sn[idx];
        switch (order) {
          case 0: r[j] += a * c + b * s; break;
          case 1: r[j] += kk * (b * c - a * s); break;
          default: r[j] -= kk * kk * (a * c + b * s); break;
        }
      }
    }
    return r;
  }

  /// Discrete Fourier projection of M uniform samples onto K modes.
  static VecX project_samples(const VecX& samples, int K) {
    const int S = static_cast<int>(samples.size());
    const auto [cs, sn] = detail::unit_roots<Scalar>(S);
    VecX c = VecX::Zero(2 * K + 1);
    c[0] = samples.mean();
    for (int k = 1; k <= K; ++k) {
      Scalar a = 0, b = 0;
      for (int j = 0; j < S; ++j) {
        const int idx = static_cast<int>((static_cast<long long>(k) * j) % S);
        a += samples[j] * cs[idx];
        b += samples[j] * sn[idx];
      }
      c[2 * k - 1] = Scalar(2) * a / Scalar(S);
      c[2 * k] = Scalar(2) * b / Scalar(S);
    }
    return c;
  }

  Matrix2X<Scalar> positions() const {
    const VecX r = radius_at_nodes();
    const auto [cs, sn] = detail::unit_roots<Scalar>(node_count_);
    Matrix2X<Scalar> x(2, node_count_);
    x.row(0) = (center_[0] + (r.array() * cs.array())).matrix().transpose();
    x.row(1) = (center_[1] + (r.array() * sn.array())).matrix().transpose();
    return x;
  }

  /// Outward unit normals ν = (ρ e_r − ρ' e_θ)/|x'|.
  Matrix2X<Scalar> normals() const {
    const VecX r = radius_at_nodes(), dr = radius_at_nodes(1);
    const auto [cs, sn] = detail::unit_roots<Scalar>(node_count_);
    Matrix2X<Scalar> n(2, node_count_);
    for (int j = 0; j < node_count_; ++j) {
      const Scalar s = std::hypot(r[j], dr[j]);
      n(0, j) = (r[j] * cs[j] + dr[j] * sn[j]) / s;
      n(1, j) = (r[j] * sn[j] - dr[j] * cs[j]) / s;
    }
    return n;
  }

  /// |x'(θ_j)| = √(ρ² + ρ'²).
  VecX speeds() const {
    const VecX r = radius_at_nodes(), dr = radius_at_nodes(1);
    return (r.array().square() + dr.array().square()).sqrt().matrix();
  }

  /// Arc-length quadrature weights (periodic trapezoid).
  VecX weights() const {
    return speeds() * (Scalar(2) * std::numbers::pi_v<Scalar> /
                       Scalar(node_count_));
  }

  /// Same center and grid, new coefficients (validated again).
  StarCurve with_coeffs(VecX coeffs) const {
    return StarCurve(center_, std::move(coeffs), node_count_);
  }

 private:
  Vec2 center_;
  VecX coeffs_;
  int node_count_;
};

/// Signed mean curvature H = −κ at every node.
template <typename Scalar>
VectorX<Scalar> curvature(const StarCurve<Scalar>& curve) {
  const auto r = curve.radius_at_nodes(0);
  const auto d1 = curve.radius_at_nodes(1);
  const auto d2 = curve.radius_at_nodes(2);
  VectorX<Scalar> H(r.size());
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const Scalar s2 = r[j] * r[j] + d1[j] * d1[j];
    const Scalar kappa =
        (s2 + d1[j] * d1[j] - r[j] * d2[j]) / (s2 * std::sqrt(s2));
    H[j] = -kappa;
  }
  return H;
}

/// ½∮ρ² dθ on the node grid (exact for M > 4K).
template <typename Scalar>
Scalar enclosed_area(const StarCurve<Scalar>& curve) {
  const auto r = curve.radius_at_nodes();
  return std::numbers::pi_v<Scalar> * r.squaredNorm() /
         Scalar(curve.node_count());
}

template <typename Scalar>
Scalar arc_length(const StarCurve<Scalar>& curve) {
  return curve.weights().sum();
}

/// |Γ| − 2√(π·area); zero exactly on circles.
template <typename Scalar>
Scalar isoperimetric_deficit(const StarCurve<Scalar>& curve) {
  return arc_length(curve) -
         Scalar(2) * std::sqrt(std::numbers::pi_v<Scalar> * enclosed_area(curve));
}

/// Centroid of the enclosed region, (1/3A)∮ρ³ e_r dθ shifted by the center.
template <typename Scalar>
Vector2<Scalar> region_centroid(const StarCurve<Scalar>& curve) {
  const auto r = curve.radius_at_nodes();
  const auto [cs, sn] = detail::unit_roots<Scalar>(curve.node_count());
  const Scalar dth =
      Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(curve.node_count());
  const Scalar A = enclosed_area(curve);
  Vector2<Scalar> m(0, 0);
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const Scalar r3 = r[j] * r[j] * r[j];
    m[0] += r3 * cs[j];
    m[1] += r3 * sn[j];
  }
  return curve.center() + m * (dth / (Scalar(3) * A));
}

/// Normal height over the circle ∂B(0, R) that reaches the circle of center
/// y and radius R + y0, at the point R(cos θ, sin θ).
template <typename Scalar>
Scalar hanzawa_delta(Scalar R, Scalar y0, const Vector2<Scalar>& y,
                     Scalar theta) {
  if (!(R > 0) || !(R + y0 > 0) || !((R + y0) * (R + y0) > y.squaredNorm()))
    throw GeometryError("degenerate target circle: need (R+y0)^2 > |y|^2");
  const Scalar proj = y[0] * std::cos(theta) + y[1] * std::sin(theta);
  return proj - R +
         std::sqrt(proj * proj + (R + y0) * (R + y0) - y.squaredNorm());
}

/// Equilibrium pressure jump ⟦π⟧ = −σ(n−1)/R across a sphere of radius R.
template <typename Scalar>
Scalar young_laplace_jump(Scalar R, Scalar sigma, int n) {
  if (!(R > 0) || !(sigma > 0) || n < 2)
    throw std::invalid_argument("young_laplace_jump needs R > 0, sigma > 0, n >= 2");
  return -sigma * Scalar(n - 1) / R;
}

namespace detail {

// Radius of the circle tangent to the curve at x (normal n) passing through p.
template <typename Scalar>
Scalar tangent_circle_radius(const Vector2<Scalar>& x, const Vector2<Scalar>& n,
                             const Vector2<Scalar>& p) {
  const Vector2<Scalar> d = p - x;
  const Scalar dn = std::abs(n.dot(d));
  if (dn == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return d.squaredNorm() / (Scalar(2) * dn);
}

}  // namespace detail

/// Largest r ≤ cap for which the interior and exterior tangent disks of
/// radius r at every node meet no other node. Local bound: minimum osculating
/// radius; global bound: for each node pair, the radius of the circle tangent
/// at one node through the other.
template <typename Scalar>
Scalar ball_condition_radius(const StarCurve<Scalar>& curve, Scalar cap) {
  Scalar r = cap;
  const auto H = curvature(curve);
  for (Eigen::Index j = 0; j < H.size(); ++j)
    if (H[j] != Scalar(0)) r = std::min(r, Scalar(1) / std::abs(H[j]));
  const auto x = curve.positions();
  const auto n = curve.normals();
  const int M = curve.node_count();
  for (int i = 0; i < M; ++i) {
    const Vector2<Scalar> xi = x.col(i), ni = n.col(i);
    for (int j = 0; j < M; ++j)
      if (j != i)
        r = std::min(r, detail::tangent_circle_radius<Scalar>(xi, ni, x.col(j)));
  }
  return r;
}

/// A finite set of pairwise disjoint star curves, none enclosing another.
template <typename Scalar>
class Interface {
 public:
  explicit Interface(std::vector<StarCurve<Scalar>> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw GeometryError("interface has no components");
    for (std::size_t a = 0; a < components_.size(); ++a)
      for (std::size_t b = 0; b < components_.size(); ++b)
        if (a != b && intrudes(components_[a], components_[b]))
          throw GeometryError("components " + std::to_string(a + 1) + " and " +
                              std::to_string(b + 1) +
                              " intersect or are nested (disjointness invariant)");
  }

  explicit Interface(StarCurve<Scalar> single)
      : Interface(std::vector<StarCurve<Scalar>>{std::move(single)}) {}

  const std::vector<StarCurve<Scalar>>& components() const { return components_; }
  const StarCurve<Scalar>& operator[](std::size_t k) const { return components_[k]; }
  std::size_t size() const { return components_.size(); }

  int total_nodes() const {
    int n = 0;
    for (const auto& c : components_) n += c.node_count();
    return n;
  }

  /// Smallest node-to-node distance between distinct components (∞ if m = 1).
  Scalar min_gap() const {
    Scalar g = std::numeric_limits<Scalar>::infinity();
    for (std::size_t a = 0; a < components_.size(); ++a) {
      const auto xa = components_[a].positions();
      for (std::size_t b = a + 1; b < components_.size(); ++b) {
        const auto xb = components_[b].positions();
        for (Eigen::Index i = 0; i < xa.cols(); ++i)
          g = std::min(g, (xb.colwise() - xa.col(i)).colwise().norm().minCoeff());
      }
    }
    return g;
  }

 private:
  // True if any node of `other` lies on or inside `curve`.
  static bool intrudes(const StarCurve<Scalar>& curve,
                       const StarCurve<Scalar>& other) {
    const auto x = other.positions();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Vector2<Scalar> d = x.col(j) - curve.center();
      const Scalar dist = d.norm();
      if (dist <= curve.radius(std::atan2(d[1], d[0]))) return true;
    }
    return false;
  }

  std::vector<StarCurve<Scalar>> components_;
};

/// Ball-condition radius of the whole interface, including exterior disks
/// that would reach another component.
template <typename Scalar>
Scalar ball_condition_radius(const Interface<Scalar>& iface, Scalar cap) {
  Scalar r = cap;
  for (const auto& c : iface.components()) r = std::min(r, ball_condition_radius(c, cap));
  for (std::size_t a = 0; a < iface.size(); ++a) {
    const auto xa = iface[a].positions();
    const auto na = iface[a].normals();
    for (std::size_t b = 0; b < iface.size(); ++b) {
      if (a == b) continue;
      const auto xb = iface[b].positions();
      for (Eigen::Index i = 0; i < xa.cols(); ++i) {
        const Vector2<Scalar> xi = xa.col(i), ni = na.col(i);
        for (Eigen::Index j = 0; j < xb.cols(); ++j)
          r = std::min(r, detail::tangent_circle_radius<Scalar>(xi, ni, xb.col(j)));
      }
    }
  }
  return r;
}

/// A union of disjoint circles: a point of the equilibrium manifold.
struct Circle {
  Vector2<double> center{0.0, 0.0};
  double radius = 1.0;
};

struct EquilibriumConfig {
  std::vector<Circle> circles;

  void validate() const {
    if (circles.empty()) throw GeometryError("equilibrium has no circles");
    for (std::size_t a = 0; a < circles.size(); ++a) {
      if (!(circles[a].radius > 0))
        throw GeometryError("circle radius must be > 0");
      for (std::size_t b = a + 1; b < circles.size(); ++b)
        if ((circles[a].center - circles[b].center).norm() <=
            circles[a].radius + circles[b].radius)
          throw GeometryError("closed disks " + std::to_string(a + 1) + " and " +
                              std::to_string(b + 1) + " are not disjoint");
    }
  }

  Interface<double> interface(int nodes_per_component, int K = 0) const {
    validate();
    std::vector<StarCurve<double>> comps;
    for (const auto& c : circles)
      comps.push_back(StarCurve<double>::circle(c.center, c.radius,
                                                nodes_per_component, K));
    return Interface<double>(std::move(comps));
  }
};

using StarCurved = StarCurve<double>;
using Interfaced = Interface<double>;

}  // namespace tpstokes
