#include "tpstokes/curve_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "tpstokes/text_format.hpp"

namespace tpstokes {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

std::string write_curves(const Interfaced& iface) {
  std::string s;
  for (std::size_t k = 0; k < iface.size(); ++k) {
    if (k > 0) s += "\n";
    const auto& c = iface[k];
    s += "center " + format_double(c.center()[0]) + " " + format_double(c.center()[1]) + "\n";
    s += "coeffs";
    for (Eigen::Index i = 0; i < c.coeffs().size(); ++i) s += " " + format_double(c.coeffs()[i]);
    s += "\n";
  }
  return s;
}

int default_node_count(int K) {
  int M = 64;
  while (M < 4 * K + 4) M *= 2;
  return M;
}

Interfaced read_curves(const std::string& text, int node_count) {
  std::istringstream is(text);
  std::vector<StarCurved> comps;
  std::optional<Eigen::Vector2d> center;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw GeometryError("curve text line " + std::to_string(lineno) + ": " + msg);
  };
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    const auto tok = split_ws(line);
    if (tok.empty()) {
      if (center) fail("center without coeffs");
      continue;
    }
    try {
      if (tok[0] == "center") {
        if (center) fail("repeated center");
        if (tok.size() != 3) fail("center needs two numbers");
        center = Eigen::Vector2d(parse_double(tok[1]), parse_double(tok[2]));
      } else if (tok[0] == "coeffs") {
        if (!center) fail("coeffs before center");
        Eigen::VectorXd c(static_cast<Eigen::Index>(tok.size() - 1));
        for (std::size_t i = 1; i < tok.size(); ++i) c[i - 1] = parse_double(tok[i]);
        const int K = c.size() > 0 ? static_cast<int>(c.size() - 1) / 2 : 0;
        comps.emplace_back(*center, c, node_count > 0 ? node_count : default_node_count(K));
        center.reset();
      } else {
        fail("unknown record '" + tok[0] + "'");
      }
    } catch (const std::invalid_argument& e) {
      if (dynamic_cast<const GeometryError*>(&e)) throw;
      fail(e.what());
    }
  }
  if (center) fail("center without coeffs");
  if (comps.empty()) throw GeometryError("curve text holds no components");
  return Interfaced(std::move(comps));
}

void save_curves(const std::filesystem::path& path, const Interfaced& iface) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << write_curves(iface);
}

Interfaced load_curves(const std::filesystem::path& path, int node_count) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return read_curves(ss.str(), node_count);
}

}  // namespace tpstokes
