#include "tpstokes/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "tpstokes/text_format.hpp"

namespace tpstokes {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Spectrum: return "spectrum";
    case Mode::Thermal: return "thermal";
    case Mode::Verify: return "verify";
  }
  return "unknown";
}

bool ComponentSpec::is_circle() const {
  return coeffs.size() == 1 || (coeffs.size() > 1 && coeffs.tail(coeffs.size() - 1).isZero(0.0));
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : "\n") + e;
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<std::string>& errors) : errors_(errors) {}

  void error(int line, const std::string& msg) {
    errors_.push_back("line " + std::to_string(line) + ": " + msg);
  }

  // Typed readers. `name` is the dotted key used in messages.
  template <typename Check>
  void real(const std::map<std::string, Entry>& sec, const std::string& section,
            const std::string& key, double& out, Check ok, const char* range) {
    auto it = sec.find(key);
    if (it == sec.end()) return;
    const std::string name = section + "." + key;
    try {
      const double v = parse_double(it->second.value);
      if (!std::isfinite(v) || !ok(v)) {
        error(it->second.line, name + " must be finite and " + range);
        return;
      }
      out = v;
    } catch (const std::invalid_argument&) {
      error(it->second.line, name + " is not a number");
    }
  }

  template <typename Check>
  void integer(const std::map<std::string, Entry>& sec, const std::string& section,
               const std::string& key, int& out, Check ok, const char* range) {
    auto it = sec.find(key);
    if (it == sec.end()) return;
    const std::string name = section + "." + key;
    try {
      std::size_t pos = 0;
      const long v = std::stol(it->second.value, &pos);
      if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
      if (v < -1000000000L || v > 1000000000L || !ok(static_cast<int>(v))) {
        error(it->second.line, name + " must be " + range);
        return;
      }
      out = static_cast<int>(v);
    } catch (const std::exception&) {
      error(it->second.line, name + " is not an integer");
    }
  }

  void boolean(const std::map<std::string, Entry>& sec, const std::string& section,
               const std::string& key, bool& out) {
    auto it = sec.find(key);
    if (it == sec.end()) return;
    if (it->second.value == "true") out = true;
    else if (it->second.value == "false") out = false;
    else error(it->second.line, section + "." + key + " must be true or false");
  }

 private:
  std::vector<std::string>& errors_;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"run", {"mode"}},
      {"geometry", {"circle", "curve"}},
      {"materials", {"sigma", "mu1", "mu2", "rho_kappa1", "rho_kappa2", "d1", "d2"}},
      {"numerics",
       {"nodes", "modes", "dt", "t_max", "equilibrium_tol", "cadence", "scheme", "reach_floor",
        "reach_cap", "rescale_volume", "zero_threshold", "threads"}},
      {"thermal", {"R", "R_out", "inner_points", "outer_points", "eigenvalues"}},
      {"verify", {"suite"}},
      {"output", {"directory", "svg"}},
  };
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

Interfaced Config::interface() const {
  const int K = numerics.effective_modes();
  std::vector<StarCurved> comps;
  for (const auto& c : components) {
    if (c.coeffs.size() > 2 * K + 1)
      throw GeometryError("component on line " + std::to_string(c.line) + " has more than " +
                          std::to_string(K) + " modes");
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(2 * K + 1);
    coeffs.head(c.coeffs.size()) = c.coeffs;
    comps.emplace_back(c.center, coeffs, numerics.nodes);
  }
  return Interfaced(std::move(comps));
}

EquilibriumConfig Config::equilibrium() const {
  EquilibriumConfig eq;
  for (const auto& c : components) {
    if (!c.is_circle())
      throw GeometryError("component on line " + std::to_string(c.line) + " is not a circle");
    eq.circles.push_back(Circle{c.center, c.coeffs[0]});
  }
  eq.validate();
  return eq;
}

Config parse_config(const std::string& text) {
  std::vector<std::string> errors;
  Parser p(errors);

  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_line;
  std::vector<std::pair<std::string, Entry>> geometry_entries;
  std::string current;

  std::istringstream is(text);
  int lineno = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        p.error(lineno, "malformed section header '" + line + "'");
        continue;
      }
      current = trim(line.substr(1, line.size() - 2));
      if (!schema().count(current)) {
        p.error(lineno, "unknown section [" + current + "]");
      } else if (section_line.count(current)) {
        p.error(lineno, "section [" + current + "] repeated");
      } else {
        section_line[current] = lineno;
        sections[current];
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.error(lineno, "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (current.empty()) {
      p.error(lineno, "key '" + key + "' outside any section");
      continue;
    }
    if (!schema().count(current)) continue;  // already reported
    if (!schema().at(current).count(key)) {
      p.error(lineno, "unknown key " + current + "." + key);
      continue;
    }
    if (value.empty()) {
      p.error(lineno, current + "." + key + " has no value");
      continue;
    }
    if (current == "geometry") {
      geometry_entries.push_back({key, Entry{value, lineno}});
      continue;
    }
    auto& sec = sections[current];
    if (sec.count(key)) {
      p.error(lineno, current + "." + key + " given twice");
      continue;
    }
    sec[key] = Entry{value, lineno};
  }

  Config cfg;
  const auto gt0 = [](double v) { return v > 0; };
  const auto ge0 = [](double v) { return v >= 0; };

  if (!section_line.count("run")) {
    errors.push_back("missing section [run]");
  } else if (auto it = sections["run"].find("mode"); it == sections["run"].end()) {
    p.error(section_line["run"], "run.mode is required");
  } else {
    const std::string& m = it->second.value;
    if (m == "simulate") cfg.mode = Mode::Simulate;
    else if (m == "spectrum") cfg.mode = Mode::Spectrum;
    else if (m == "thermal") cfg.mode = Mode::Thermal;
    else if (m == "verify") cfg.mode = Mode::Verify;
    else p.error(it->second.line, "run.mode must be simulate, spectrum, thermal or verify");
  }

  auto& mat = sections["materials"];
  p.real(mat, "materials", "sigma", cfg.materials.sigma, gt0, "> 0");
  p.real(mat, "materials", "mu1", cfg.materials.mu1, gt0, "> 0");
  p.real(mat, "materials", "mu2", cfg.materials.mu2, gt0, "> 0");
  p.real(mat, "materials", "rho_kappa1", cfg.materials.rho_kappa1, gt0, "> 0");
  p.real(mat, "materials", "rho_kappa2", cfg.materials.rho_kappa2, gt0, "> 0");
  p.real(mat, "materials", "d1", cfg.materials.d1, gt0, "> 0");
  p.real(mat, "materials", "d2", cfg.materials.d2, gt0, "> 0");

  auto& num = sections["numerics"];
  auto& n = cfg.numerics;
  p.integer(num, "numerics", "nodes", n.nodes, [](int v) { return v >= 8 && v % 2 == 0 && v <= 8192; },
            "an even integer in [8, 8192]");
  p.integer(num, "numerics", "modes", n.modes, [](int v) { return v >= 0; }, ">= 0");
  p.real(num, "numerics", "dt", n.dt, gt0, "> 0");
  p.real(num, "numerics", "t_max", n.t_max, ge0, ">= 0");
  p.real(num, "numerics", "equilibrium_tol", n.equilibrium_tol, gt0, "> 0");
  p.integer(num, "numerics", "cadence", n.cadence, [](int v) { return v >= 1; }, ">= 1");
  p.real(num, "numerics", "reach_floor", n.reach_floor, ge0, ">= 0");
  p.real(num, "numerics", "reach_cap", n.reach_cap, gt0, "> 0");
  p.boolean(num, "numerics", "rescale_volume", n.rescale_volume);
  p.real(num, "numerics", "zero_threshold", n.zero_threshold,
         [](double v) { return v > 0 && v < 1; }, "in (0, 1)");
  p.integer(num, "numerics", "threads", n.threads, [](int v) { return v >= 0; }, ">= 0");
  if (auto it = num.find("scheme"); it != num.end()) {
    if (it->second.value == "rk4") n.scheme = Scheme::RK4;
    else if (it->second.value == "euler") n.scheme = Scheme::ForwardEuler;
    else p.error(it->second.line, "numerics.scheme must be rk4 or euler");
  }
  if (n.nodes < 4 * n.effective_modes() + 4)
    p.error(num.count("modes") ? num["modes"].line : section_line["numerics"],
            "numerics.modes needs nodes >= 4 * modes + 4");

  auto& th = sections["thermal"];
  p.real(th, "thermal", "R", cfg.thermal.R, gt0, "> 0");
  p.real(th, "thermal", "R_out", cfg.thermal.R_out, gt0, "> 0");
  p.integer(th, "thermal", "inner_points", cfg.thermal.inner_points, [](int v) { return v >= 16; },
            ">= 16");
  p.integer(th, "thermal", "outer_points", cfg.thermal.outer_points, [](int v) { return v >= 16; },
            ">= 16");
  p.integer(th, "thermal", "eigenvalues", cfg.thermal.eigenvalues, [](int v) { return v >= 1; },
            ">= 1");
  if (section_line.count("thermal") && !(cfg.thermal.R_out > cfg.thermal.R))
    p.error(th.count("R_out") ? th["R_out"].line : section_line["thermal"],
            "thermal.R_out must exceed thermal.R");

  if (auto it = sections["verify"].find("suite"); it != sections["verify"].end()) {
    static const std::set<std::string> suites = {"prop71",  "normal-stability", "conservation",
                                                 "convergence", "thermal", "geometry", "all"};
    if (!suites.count(it->second.value)) p.error(it->second.line, "verify.suite is unknown");
    else cfg.suite = it->second.value;
  }

  auto& out = sections["output"];
  if (auto it = out.find("directory"); it != out.end()) cfg.output.directory = it->second.value;
  p.boolean(out, "output", "svg", cfg.output.svg);

  for (const auto& [key, entry] : geometry_entries) {
    const auto tok = split_ws(entry.value);
    ComponentSpec c;
    c.line = entry.line;
    try {
      if (key == "circle") {
        if (tok.size() != 3) throw std::invalid_argument("geometry.circle needs cx cy R");
        c.center = {parse_double(tok[0]), parse_double(tok[1])};
        c.coeffs = Eigen::VectorXd::Constant(1, parse_double(tok[2]));
      } else {
        if (tok.size() < 3 || tok.size() % 2 == 0)
          throw std::invalid_argument("geometry.curve needs cx cy a0 [a1 b1 ...]");
        c.center = {parse_double(tok[0]), parse_double(tok[1])};
        c.coeffs.resize(static_cast<Eigen::Index>(tok.size() - 2));
        for (std::size_t i = 2; i < tok.size(); ++i) c.coeffs[i - 2] = parse_double(tok[i]);
      }
      if (!c.coeffs.allFinite() || !c.center.allFinite() || !(c.coeffs[0] > 0))
        throw std::invalid_argument("geometry." + key + " values must be finite with radius > 0");
      cfg.components.push_back(c);
    } catch (const std::invalid_argument& e) {
      p.error(entry.line, e.what());
    }
  }

  const bool needs_geometry = cfg.mode == Mode::Simulate || cfg.mode == Mode::Spectrum;
  if (needs_geometry && !section_line.count("geometry"))
    errors.push_back("missing section [geometry] (required for mode " + to_string(cfg.mode) + ")");
  else if (needs_geometry && cfg.components.empty() && errors.empty())
    p.error(section_line["geometry"], "geometry lists no components");
  if (cfg.mode == Mode::Thermal && !section_line.count("thermal"))
    errors.push_back("missing section [thermal] (required for mode thermal)");

  if (errors.empty() && needs_geometry) {
    const int line = section_line["geometry"];
    try {
      if (cfg.mode == Mode::Spectrum) {
        cfg.equilibrium();
      }
      (void)cfg.interface();
    } catch (const GeometryError& e) {
      p.error(line, std::string("geometry: ") + e.what());
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError({"cannot read config file " + path});
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace tpstokes
