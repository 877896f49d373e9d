#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "tpstokes/spectra.hpp"
#include "tpstokes/text_format.hpp"

using namespace tpstokes;
constexpr double pi = std::numbers::pi;

namespace {

const EquilibriumConfig kOne{{Circle{{0, 0}, 1.0}}};
const EquilibriumConfig kTwo{{Circle{{0, 0}, 1.0}, Circle{{5, 0}, 1.5}}};

Perturbation heights(std::vector<Eigen::VectorXd> h) {
  Perturbation z;
  z.heights = std::move(h);
  return z;
}

Eigen::VectorXd mode(int K, int index, double value) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(2 * K + 1);
  h[index] = value;
  return h;
}

}  // namespace

TEST_CASE("A multipliers") {
  const auto ev = a_sigma_eigenvalues(1.0, 2);
  CHECK(ev[0].second == -1.0);
  CHECK(ev[1].second == 0.0);
  CHECK(ev[2].second == 3.0);
  for (double R : {1.0, 1.5}) {
    const int M = 128;
    const Eigen::MatrixXd A = a_sigma_matrix(R, M);
    for (int k = 0; k <= 16; ++k) {
      // A is circulant, so its multiplier on mode k is the cosine transform of
      // the first column, accumulated here in extended precision.
      long double symbol = 0;
      for (int d = 0; d < M; ++d)
        symbol += static_cast<long double>(A(d, 0)) *
                  std::cos(2 * std::numbers::pi_v<long double> * k * d / M);
      const double expect = (k * k - 1.0) / (R * R);
      CHECK(std::abs(double(symbol) - expect) <= 1e-12);
      Eigen::VectorXd c(M), s(M);
      for (int j = 0; j < M; ++j) c[j] = std::cos(2 * pi * k * j / M), s[j] = std::sin(2 * pi * k * j / M);
      // Double-precision products lose a few digits to entries of size O(M²).
      CHECK((A * c - expect * c).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((A * s - expect * s).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("linearized operator kernel") {
  const MaterialParams mat;
  const Eigen::MatrixXd L = assemble_linearized(kOne, mat, 64);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(64), c(64), s(64);
  for (int j = 0; j < 64; ++j) c[j] = std::cos(2 * pi * j / 64), s[j] = std::sin(2 * pi * j / 64);
  CHECK((L * one).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((L * c).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((L * s).cwiseAbs().maxCoeff() <= 1e-10);
  const SpectrumReport r1 = analyze_spectrum(L);
  CHECK(r1.kernel_dim == 3);
  CHECK(r1.semisimple);
  CHECK(r1.kernel_stable);
  for (const auto& z : r1.eigenvalues) CHECK(z.real() >= -1e-7 * r1.norm);
  // Mode 2 on the unit circle relaxes at σ·2/(4μ).
  CHECK(r1.spectral_gap == doctest::Approx(0.5).epsilon(1e-10));

  const SpectrumReport r2 = analyze_spectrum(assemble_linearized(kTwo, mat, 64));
  CHECK(r2.kernel_dim == 6);
  CHECK(r2.semisimple);
}

TEST_CASE("linearized operator is linear in sigma") {
  MaterialParams a, b;
  b.sigma = 2.0;
  const Eigen::MatrixXd La = assemble_linearized(kOne, a, 32);
  const Eigen::MatrixXd Lb = assemble_linearized(kOne, b, 32);
  CHECK((Lb - 2.0 * La).cwiseAbs().maxCoeff() <= 1e-14 * La.cwiseAbs().maxCoeff());
}

TEST_CASE("analyze synthetic matrices") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D(2, 2) = -1.0;
  const SpectrumReport r = analyze_spectrum(D);
  CHECK(r.kernel_dim == 2);
  CHECK(r.semisimple);
  CHECK(r.spectral_gap == 1.0);

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
  J(0, 1) = 1.0;
  J(2, 2) = 2.0;
  CHECK_FALSE(analyze_spectrum(J).semisimple);
  CHECK_THROWS(analyze_spectrum(Eigen::MatrixXd::Zero(2, 3)));
}

TEST_CASE("spectrum report keys") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(1, 1) = 1.0;
  const std::string text = spectrum_report_text(analyze_spectrum(D, 1e-7, 2));
  for (const char* key : {"\"eigenvalues\"", "\"kernel_dim\": 1", "\"semisimple\": true",
                          "\"spectral_gap\": 1", "\"zero_threshold\"", "\"resolution\": 2",
                          "\"domain_model\": \"free-space\""})
    CHECK(text.find(key) != std::string::npos);
  CHECK(text.find("[0, 0]") != std::string::npos);
}

TEST_CASE("second variation examples") {
  const MaterialParams mat;
  const auto trans = second_variation(kOne, heights({mode(2, 1, 1.0)}), mat, 1.0);
  CHECK(std::abs(trans.value) <= 1e-10);
  CHECK(trans.constraints_satisfied);

  const auto c2 = second_variation(kOne, heights({mode(2, 3, 1.0)}), mat, 1.0);
  CHECK(std::abs(c2.value - 3 * pi) <= 1e-10);

  const auto c = second_variation(kOne, heights({mode(2, 0, 0.3)}), mat, 1.0);
  CHECK_FALSE(c.constraints_satisfied);

  CHECK_THROWS(second_variation(kOne, heights({mode(2, 3, 1.0)}), mat, 0.0));
}

TEST_CASE("second variation is nonnegative on the constraint set") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  const MaterialParams mat;
  for (const auto* eq : {&kOne, &kTwo}) {
    for (int t = 0; t < 200; ++t) {
      Perturbation z;
      z.velocity_norm_sq = std::abs(n(rng));
      z.thermal = Eigen::VectorXd(4);
      for (int i = 1; i < 4; ++i) z.thermal[i] = n(rng);
      z.thermal[0] = 0.0;
      for (std::size_t k = 0; k < eq->circles.size(); ++k) {
        Eigen::VectorXd h(11);
        for (int i = 0; i < 11; ++i) h[i] = n(rng);
        h[0] = 0.0;
        z.heights.push_back(h);
      }
      const auto sv = second_variation(*eq, z, mat, 1.3);
      CHECK(sv.constraints_satisfied);
      CHECK(sv.value >= -1e-10);
    }
  }
}
