#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tpstokes/curve_io.hpp"
#include "tpstokes/text_format.hpp"

using namespace tpstokes;

TEST_CASE("format_double round trips bit exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, i % 40 - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK_THROWS(parse_double("1.0x"));
  CHECK_THROWS(parse_double(""));
}

TEST_CASE("curve text golden") {
  Eigen::VectorXd c(5);
  c << 1.0, 0.0, 0.0, 0.05, 0.0;
  Interfaced one(StarCurved({0.5, -1.0}, c, 64));
  CHECK(write_curves(one) == "center 0.5 -1\ncoeffs 1 0 0 0.050000000000000003 0\n");
}

TEST_CASE("curve text round trip") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd a(9), b(5);
  a[0] = 1.0 + 0.1 * u(rng);
  for (int i = 1; i < 9; ++i) a[i] = 0.01 * u(rng);
  b[0] = 0.7;
  for (int i = 1; i < 5; ++i) b[i] = 0.01 * u(rng);
  Interfaced two({StarCurved({u(rng), u(rng)}, a, 64), StarCurved({4.0, 0.1}, b, 64)});
  const std::string text = write_curves(two);
  const Interfaced back = read_curves(text, 64);
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back[k].center() == two[k].center());
    CHECK(back[k].coeffs() == two[k].coeffs());
  }
  CHECK(write_curves(back) == text);
}

TEST_CASE("curve text errors") {
  CHECK_THROWS_AS(read_curves("coeffs 1\n"), GeometryError);
  CHECK_THROWS_AS(read_curves("center 0 0\n"), GeometryError);
  CHECK_THROWS_AS(read_curves("center 0 0\ncoeffs 1 zz 0\n"), GeometryError);
  CHECK_THROWS_AS(read_curves(""), GeometryError);
  CHECK_THROWS_WITH(read_curves("center 0 0\nbogus 1\n"), doctest::Contains("line 2"));
}

TEST_CASE("default node count") {
  CHECK(default_node_count(0) == 64);
  CHECK(default_node_count(15) == 64);
  CHECK(default_node_count(16) == 128);
  CHECK(read_curves("center 0 0\ncoeffs 1\n")[0].node_count() == 64);
}

TEST_CASE("ledger csv header") {
  CHECK(ledger_header(2) == "t,area,volume_1,volume_2,dissipation,max_v,reach,deficit");
  LedgerRow r;
  r.t = 0.5;
  r.area = 2.0;
  r.volumes = {3.0};
  CHECK(ledger_line(r) == "0.5,2,3,0,0,0,0");
}

TEST_CASE("svg has one path per component") {
  Interfaced two({StarCurved::circle({0, 0}, 1.0, 64), StarCurved::circle({3, 0}, 1.0, 64)});
  const std::string svg = interface_svg(two, 32);
  std::size_t count = 0;
  for (auto p = svg.find("<path"); p != std::string::npos; p = svg.find("<path", p + 1)) ++count;
  CHECK(count == 2);
  CHECK(svg.find("viewBox=\"0 0 1 1\"") != std::string::npos);
}
