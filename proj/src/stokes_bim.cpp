#include "tpstokes/stokes_bim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <thread>

#include <Eigen/LU>

namespace tpstokes {

namespace {

constexpr double kPi = std::numbers::pi;

// Sign of the double-layer term in the interfacial equation
//   (1+λ)/2 u = S[f]/μ₂ + s·(1−λ) D[u],
// with outward normals and x̂ = source − target.
constexpr double kDoubleLayerSign = 1.0;

// Product-rule weights for ∫ log(4 sin²((t−s)/2)) φ(s) ds on 2n equispaced
// nodes; depend only on the index offset.
Eigen::VectorXd log_weights(int M) {
  const int n = M / 2;
  Eigen::VectorXd R(M);
  for (int d = 0; d < M; ++d) {
    const double t = kPi * d / n;
    double acc = 0.0;
    for (int m = 1; m < n; ++m) acc += std::cos(m * t) / m;
    R[d] = -2.0 * kPi / n * acc - kPi / (double(n) * n) * std::cos(n * t);
  }
  return R;
}

// log(4 sin²(π d / M)) for d ≠ 0.
Eigen::VectorXd log_sin_table(int M) {
  Eigen::VectorXd L(M);
  L[0] = 0.0;
  for (int d = 1; d < M; ++d) {
    const double s = std::sin(kPi * d / M);
    L[d] = std::log(4.0 * s * s);
  }
  return L;
}

void parallel_rows(int rows, int threads, const std::function<void(int)>& body) {
  threads = std::clamp(threads, 1, std::max(1, rows));
  if (threads == 1) {
    for (int i = 0; i < rows; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < rows; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

double default_gauge(const CollocationGrid& grid) {
  const Eigen::Vector2d lo = grid.nodes.rowwise().minCoeff();
  const Eigen::Vector2d hi = grid.nodes.rowwise().maxCoeff();
  return 2.0 * (hi - lo).norm();
}

void check_separation(const CollocationGrid& grid) {
  for (int a = 0; a < grid.components(); ++a)
    for (int b = a + 1; b < grid.components(); ++b) {
      const double h = std::max(grid.spacing(a), grid.spacing(b));
      double gap = std::numeric_limits<double>::infinity();
      for (int i = grid.offsets[a]; i < grid.offsets[a + 1]; ++i)
        for (int j = grid.offsets[b]; j < grid.offsets[b + 1]; ++j)
          gap = std::min(gap, (grid.nodes.col(i) - grid.nodes.col(j)).norm());
      if (gap < 3.0 * h)
        throw NearContactError(
            "components " + std::to_string(a + 1) + " and " +
            std::to_string(b + 1) + " are closer than 3 node spacings (gap " +
            std::to_string(gap) + ", spacing " + std::to_string(h) + ")");
    }
}

// Quadrature-weighted single-layer velocity at node i due to unit traction
// jump at node j, without the 1/(4πμ) prefactor. Returns the 2-vector
// multiplying g_j.
struct SingleLayer {
  const CollocationGrid& grid;
  std::vector<Eigen::VectorXd> logw;  // per component
  std::vector<Eigen::VectorXd> logsin;
  double log_gauge;

  SingleLayer(const CollocationGrid& g, double gauge) : grid(g), log_gauge(std::log(gauge)) {
    for (int k = 0; k < g.components(); ++k) {
      const int M = g.nodes_in(k);
      if (M % 2 != 0)
        throw GeometryError("boundary-integral assembly needs an even node count");
      logw.push_back(log_weights(M));
      logsin.push_back(log_sin_table(M));
    }
  }

  Eigen::Vector2d column(int i, int j) const {
    const int a = grid.component_index[i], b = grid.component_index[j];
    const int M = grid.nodes_in(b);
    const double h = 2.0 * kPi / M;
    const Eigen::Vector2d nj = grid.normals.col(j);
    const double sj = grid.speeds[j];
    if (a == b) {
      const int p = i - grid.offsets[a], q = j - grid.offsets[b];
      const int off = (p - q + M) % M;
      if (off == 0)
        return -(0.5 * logw[b][0] + h * (std::log(sj) - log_gauge)) * sj * nj;
      const Eigen::Vector2d d = grid.nodes.col(i) - grid.nodes.col(j);
      const double r2 = d.squaredNorm();
      const double smooth = 0.5 * (std::log(r2) - logsin[b][off]);
      return (-(0.5 * logw[b][off] + h * (smooth - log_gauge)) * nj +
              h * d * (d.dot(nj) / r2)) *
             sj;
    }
    const Eigen::Vector2d d = grid.nodes.col(i) - grid.nodes.col(j);
    const double r2 = d.squaredNorm();
    return h * sj * (-(0.5 * std::log(r2) - log_gauge) * nj + d * (d.dot(nj) / r2));
  }
};

// Quadrature-weighted double-layer block (1/4π)·T_ijk n_k w_j acting on the
// velocity at node j, evaluated at node i.
Eigen::Matrix2d double_layer_block(const CollocationGrid& grid, int i, int j) {
  if (i == j) {
    const Eigen::Vector2d t(-grid.normals(1, i), grid.normals(0, i));
    const double kappa = -grid.curvature[i];
    return grid.weights[i] / (4.0 * kPi) * (-2.0 * kappa) * (t * t.transpose());
  }
  const Eigen::Vector2d xh = grid.nodes.col(j) - grid.nodes.col(i);
  const double r2 = xh.squaredNorm();
  const double xn = xh.dot(grid.normals.col(j));
  return grid.weights[j] / (4.0 * kPi) * (-4.0 * xn / (r2 * r2)) *
         (xh * xh.transpose());
}

Eigen::MatrixXd single_layer_velocity(const CollocationGrid& grid, double mu,
                                      double gauge, int threads) {
  const int n = grid.size();
  const SingleLayer sl(grid, gauge);
  Eigen::MatrixXd S(2 * n, n);
  const double pref = 1.0 / (4.0 * kPi * mu);
  parallel_rows(n, threads, [&](int i) {
    for (int j = 0; j < n; ++j) S.block<2, 1>(2 * i, j) = pref * sl.column(i, j);
  });
  return S;
}

// Interfacial velocity operator for a viscosity contrast λ = μ₁/μ₂.
Eigen::MatrixXd contrast_velocity(const CollocationGrid& grid, double mu1,
                                  double mu2, double gauge, int threads) {
  const int n = grid.size();
  const double lambda = mu1 / mu2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2 * n, 2 * n) * (0.5 * (1.0 + lambda));
  parallel_rows(n, threads, [&](int i) {
    for (int j = 0; j < n; ++j)
      A.block<2, 2>(2 * i, 2 * j) -=
          kDoubleLayerSign * (1.0 - lambda) * double_layer_block(grid, i, j);
  });
  const Eigen::MatrixXd S = single_layer_velocity(grid, mu2, gauge, threads);
  return A.partialPivLu().solve(S);
}

Eigen::MatrixXd project_normal(const CollocationGrid& grid, const Eigen::MatrixXd& U) {
  const int n = grid.size();
  Eigen::MatrixXd N(n, U.cols());
  for (int i = 0; i < n; ++i)
    N.row(i) = grid.normals(0, i) * U.row(2 * i) + grid.normals(1, i) * U.row(2 * i + 1);
  return N;
}

bool inside(const Interfaced& iface, const Eigen::Vector2d& x) {
  for (const auto& c : iface.components()) {
    const Eigen::Vector2d d = x - c.center();
    if (d.norm() < c.radius(std::atan2(d[1], d[0]))) return true;
  }
  return false;
}

}  // namespace

CollocationGrid CollocationGrid::build(const Interfaced& iface) {
  CollocationGrid g;
  const int n = iface.total_nodes();
  g.nodes.resize(2, n);
  g.normals.resize(2, n);
  g.speeds.resize(n);
  g.weights.resize(n);
  g.curvature.resize(n);
  g.offsets.push_back(0);
  int at = 0;
  for (std::size_t k = 0; k < iface.size(); ++k) {
    const auto& c = iface[k];
    const int M = c.node_count();
    g.nodes.middleCols(at, M) = c.positions();
    g.normals.middleCols(at, M) = c.normals();
    g.speeds.segment(at, M) = c.speeds();
    g.weights.segment(at, M) = c.weights();
    g.curvature.segment(at, M) = tpstokes::curvature(c);
    g.component_index.insert(g.component_index.end(), M, static_cast<int>(k));
    at += M;
    g.offsets.push_back(at);
  }
  return g;
}

Eigen::VectorXd CollocationGrid::indicator(int k) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(size());
  e.segment(offsets[k], nodes_in(k)).setOnes();
  return e;
}

double CollocationGrid::spacing(int k) const {
  return weights.segment(offsets[k], nodes_in(k)).maxCoeff();
}

Eigen::MatrixXd NtDOperator::weighted_form() const {
  const Eigen::MatrixXd WN = grid_.weights.asDiagonal() * matrix_;
  return 0.5 * (WN + WN.transpose());
}

int assembly_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TPSTOKES_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Interfaced resample(const Interfaced& iface, int nodes_per_component) {
  if (nodes_per_component <= 0) return iface;
  std::vector<StarCurved> comps;
  for (const auto& c : iface.components())
    comps.emplace_back(c.center(), c.coeffs(), nodes_per_component);
  return Interfaced(std::move(comps));
}

NtDOperator assemble_ntd(const Interfaced& iface_in, const MaterialParams& materials,
                         int nodes_per_component, const AssemblyOptions& options) {
  if (!(materials.mu1 > 0) || !(materials.mu2 > 0))
    throw std::invalid_argument("viscosities must be > 0");
  const Interfaced iface = resample(iface_in, nodes_per_component);
  CollocationGrid grid = CollocationGrid::build(iface);
  check_separation(grid);
  const double gauge =
      options.gauge_length > 0 ? options.gauge_length : default_gauge(grid);
  const int threads = assembly_threads(options.threads);

  Eigen::MatrixXd N;
  if (materials.matched_viscosity()) {
    const int n = grid.size();
    const SingleLayer sl(grid, gauge);
    const double pref = 1.0 / (4.0 * kPi * materials.mu1);
    N.resize(n, n);
    parallel_rows(n, threads, [&](int i) {
      const Eigen::Vector2d ni = grid.normals.col(i);
      for (int j = 0; j < n; ++j) N(i, j) = pref * ni.dot(sl.column(i, j));
    });
  } else {
    N = project_normal(grid, contrast_velocity(grid, materials.mu1, materials.mu2,
                                               gauge, threads));
  }
  return NtDOperator(std::move(N), std::move(grid), materials.mu1, materials.mu2, gauge);
}

Eigen::VectorXd apply_ntd(const NtDOperator& op, const Eigen::VectorXd& g) {
  if (g.size() != op.grid().size())
    throw std::invalid_argument("apply_ntd: density has " + std::to_string(g.size()) +
                                " entries, grid has " + std::to_string(op.grid().size()));
  return op.matrix() * g;
}

double weighted_inner(const CollocationGrid& grid, const Eigen::VectorXd& g,
                      const Eigen::VectorXd& h) {
  if (g.size() != grid.size() || h.size() != grid.size())
    throw std::invalid_argument("weighted_inner: size mismatch");
  return (grid.weights.array() * g.array() * h.array()).sum();
}

double dissipation(const NtDOperator& op, const Eigen::VectorXd& g) {
  return weighted_inner(op.grid(), apply_ntd(op, g), g);
}

Eigen::VectorXd remove_component_means(const CollocationGrid& grid,
                                       const Eigen::VectorXd& g) {
  Eigen::VectorXd out = g;
  for (int k = 0; k < grid.components(); ++k) {
    auto w = grid.weights.segment(grid.offsets[k], grid.nodes_in(k));
    auto seg = out.segment(grid.offsets[k], grid.nodes_in(k));
    const double mean = w.dot(seg) / w.sum();
    seg.array() -= mean;
  }
  return out;
}

Eigen::Matrix2Xd velocity_field(const Interfaced& iface, const MaterialParams& materials,
                                const Eigen::VectorXd& g,
                                const Eigen::Matrix2Xd& query_points,
                                const AssemblyOptions& options) {
  const CollocationGrid grid = CollocationGrid::build(iface);
  if (g.size() != grid.size()) throw std::invalid_argument("velocity_field: size mismatch");
  const double gauge =
      options.gauge_length > 0 ? options.gauge_length : default_gauge(grid);
  const double log_gauge = std::log(gauge);
  double h = 0.0;
  for (int k = 0; k < grid.components(); ++k) h = std::max(h, grid.spacing(k));

  const bool matched = materials.matched_viscosity();
  const double lambda = materials.mu1 / materials.mu2;
  Eigen::VectorXd u_nodes;
  if (!matched) {
    check_separation(grid);
    u_nodes = contrast_velocity(grid, materials.mu1, materials.mu2, gauge,
                                assembly_threads(options.threads)) *
              g;
  }

  Eigen::Matrix2Xd out(2, query_points.cols());
  for (Eigen::Index q = 0; q < query_points.cols(); ++q) {
    const Eigen::Vector2d x = query_points.col(q);
    const double dist =
        (grid.nodes.colwise() - x).colwise().norm().minCoeff();
    if (dist < 3.0 * h)
      throw NearContactError("query point closer than 3 node spacings to the interface");
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    for (int j = 0; j < grid.size(); ++j) {
      const Eigen::Vector2d d = x - grid.nodes.col(j);
      const Eigen::Vector2d nj = grid.normals.col(j);
      const double r2 = d.squaredNorm();
      u += grid.weights[j] * g[j] *
           (-(0.5 * std::log(r2) - log_gauge) * nj + d * (d.dot(nj) / r2));
    }
    u /= 4.0 * kPi * materials.mu2;
    if (!matched) {
      Eigen::Vector2d dl = Eigen::Vector2d::Zero();
      for (int j = 0; j < grid.size(); ++j) {
        const Eigen::Vector2d xh = grid.nodes.col(j) - x;
        const double r2 = xh.squaredNorm();
        const double xn = xh.dot(grid.normals.col(j));
        const Eigen::Vector2d uj = u_nodes.segment<2>(2 * j);
        dl += grid.weights[j] * (-4.0 * xn / (r2 * r2)) * xh * xh.dot(uj);
      }
      u += kDoubleLayerSign * (1.0 - lambda) / (4.0 * kPi) * dl;
      if (inside(iface, x)) u /= lambda;
    }
    out.col(q) = u;
  }
  return out;
}

}  // namespace tpstokes
