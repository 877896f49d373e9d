#include "tpstokes/text_format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <system_error>

namespace tpstokes {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  return v;
}

std::string ledger_header(std::size_t components) {
  std::string h = "t,area";
  for (std::size_t k = 1; k <= components; ++k) h += ",volume_" + std::to_string(k);
  h += ",dissipation,max_v,reach,deficit";
  return h;
}

std::string ledger_line(const LedgerRow& row) {
  std::string s = format_double(row.t) + "," + format_double(row.area);
  for (double v : row.volumes) s += "," + format_double(v);
  s += "," + format_double(row.dissipation) + "," + format_double(row.max_v) + "," +
       format_double(row.reach) + "," + format_double(row.deficit);
  return s;
}

std::string ledger_csv(const std::vector<LedgerRow>& rows) {
  std::string out = ledger_header(rows.empty() ? 0 : rows.front().volumes.size()) + "\n";
  for (const auto& r : rows) out += ledger_line(r) + "\n";
  return out;
}

std::string interface_svg(const Interfaced& iface, int samples) {
  std::vector<std::vector<Eigen::Vector2d>> paths;
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(INFINITY), hi = -lo;
  for (const auto& c : iface.components()) {
    std::vector<Eigen::Vector2d> p;
    for (int j = 0; j < samples; ++j) {
      const double th = 2.0 * std::numbers::pi * j / samples;
      const Eigen::Vector2d x = c.center() + c.radius(th) * Eigen::Vector2d(std::cos(th), std::sin(th));
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
      p.push_back(x);
    }
    paths.push_back(std::move(p));
  }
  const double scale = 0.9 / std::max((hi - lo).maxCoeff(), 1e-300);
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  // y is flipped so the picture has the usual orientation.
  auto map = [&](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(0.5 + scale * (x[0] - mid[0]), 0.5 - scale * (x[1] - mid[1]));
  };
  std::string s =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"512\" "
      "height=\"512\">\n";
  for (const auto& p : paths) {
    s += "  <path fill=\"none\" stroke=\"black\" stroke-width=\"0.003\" d=\"";
    for (std::size_t j = 0; j < p.size(); ++j) {
      const Eigen::Vector2d q = map(p[j]);
      s += (j == 0 ? "M" : " L") + format_double(q[0]) + " " + format_double(q[1]);
    }
    s += " Z\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string spectrum_report_text(const SpectrumReport& r) {
  std::string s = "{\n  \"eigenvalues\": [";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    s += (i == 0 ? "\n    [" : ",\n    [") + format_double(r.eigenvalues[i].real()) + ", " +
         format_double(r.eigenvalues[i].imag()) + "]";
  }
  s += "\n  ],\n";
  s += "  \"kernel_dim\": " + std::to_string(r.kernel_dim) + ",\n";
  s += std::string("  \"semisimple\": ") + (r.semisimple ? "true" : "false") + ",\n";
  s += "  \"spectral_gap\": " + format_double(r.spectral_gap) + ",\n";
  s += "  \"zero_threshold\": " + format_double(r.zero_threshold) + ",\n";
  s += "  \"resolution\": " + std::to_string(r.resolution) + ",\n";
  s += "  \"domain_model\": \"free-space\"\n}\n";
  return s;
}

}  // namespace tpstokes
