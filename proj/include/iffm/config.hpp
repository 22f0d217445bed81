#pragma once

// Experiment configuration as a single JSON document, plus built-in presets.
//
// {
//   "subsystem":  {"A": [[...]], "b": [...]},
//   "motifs":     [{"kind": "iffm-1", "c": [...], "d": 1.2, "beta": 1.5, "K": 0.8,
//                   "gamma": 0.8, "inits": [...]}],
//   "inits":      [{"label": "...", "x0": [...] | {"steady_ray": v},
//                   "y0": number | "steady" | "michaelis"}],
//   "T": 1.5,
//   "grid":       {"min": 1e-3, "max": 1e3, "points": 121, "log": true},
//   "integrator": {"rtol": 1e-9, "atol": 1e-12, "n_samples": 2001, "dt_max": ..., "x_floor": 1e-12},
//   "out": "results"
// }
//
// Per-motif "inits" override the top-level list.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iffm/integrator.hpp"
#include "iffm/quadrature.hpp"
#include "iffm/response.hpp"

namespace iffm {

struct GridSpec {
  double min = kDefaultGridMin;
  double max = kDefaultGridMax;
  int points = kDefaultGridPoints;
  bool log = true;

  std::vector<double> values() const {
    return log ? log_grid(min, max, points) : linear_grid(min, max, points);
  }
};

/// "min:max:points:log" with the last field one of log/lin/linear/true/false.
inline GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4) throw ConfigError("grid", "expected min:max:points:log");
  GridSpec g;
  try {
    std::size_t used = 0;
    g.min = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("min");
    g.max = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("max");
    g.points = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("points");
  } catch (const std::exception&) {
    throw ConfigError("grid", "could not parse '" + text + "'");
  }
  const std::string& mode = parts[3];
  if (mode == "log" || mode == "true" || mode == "1") g.log = true;
  else if (mode == "lin" || mode == "linear" || mode == "false" || mode == "0") g.log = false;
  else throw ConfigError("grid", "spacing must be log or lin, got '" + mode + "'");
  if (!(g.min > 0.0) || !(g.max > g.min) || g.points < 2) {
    throw ConfigError("grid", "need 0 < min < max and points >= 2");
  }
  return g;
}

struct MotifEntry {
  MotifSpec motif;
  std::vector<InitialPolicy> inits;
};

struct ExperimentConfig {
  std::string name = "custom";
  LinearSubsystem subsystem = LinearSubsystem::unit_scalar();
  std::vector<MotifEntry> motifs;
  SimConfig sim;
  GridSpec grid;
  std::string out = "results";
  nlohmann::ordered_json source;  ///< the document this config was parsed from

  const MotifEntry* find(const std::string& name) const {
    const auto kind = parse_kind(name);
    for (const auto& m : motifs) {
      if (m.motif.name() == name || (kind && m.motif.kind() == *kind)) return &m;
    }
    return nullptr;
  }
};

namespace detail {

using CJson = nlohmann::ordered_json;

inline double number_at(const CJson& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline Vector vector_at(const CJson& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number_at(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix matrix_at(const CJson& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of rows");
  const std::size_t n = j.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != n) throw ConfigError(row, "expected " + std::to_string(n) + " entries");
    for (std::size_t k = 0; k < n; ++k) m(i, k) = number_at(j[i][k], row + "[" + std::to_string(k) + "]");
  }
  return m;
}

inline void check_keys(const CJson& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok |= it.key() == a;
    if (!ok) throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

inline InitialPolicy parse_init(const CJson& j, const std::string& path, Eigen::Index n, std::size_t index) {
  check_keys(j, path, {"label", "x0", "y0"});
  InitialPolicy p;
  p.label = "init" + std::to_string(index + 1);
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ConfigError(path + ".label", "expected a string");
    p.label = j["label"].get<std::string>();
  }
  if (!j.contains("x0")) throw ConfigError(path + ".x0", "missing");
  const CJson& x0 = j["x0"];
  if (x0.is_object()) {
    check_keys(x0, path + ".x0", {"steady_ray"});
    if (!x0.contains("steady_ray")) throw ConfigError(path + ".x0.steady_ray", "missing");
    const double v = number_at(x0["steady_ray"], path + ".x0.steady_ray");
    if (!(v >= 0.0)) throw ConfigError(path + ".x0.steady_ray", "must be >= 0");
    p.x0 = SteadyRay{v};
  } else {
    Vector x = vector_at(x0, path + ".x0");
    if (x.size() != n) throw ConfigError(path + ".x0", "expected " + std::to_string(n) + " entries");
    if ((x.array() < 0.0).any()) throw ConfigError(path + ".x0", "entries must be >= 0");
    p.x0 = x;
  }
  const CJson y0 = j.contains("y0") ? j["y0"] : CJson("steady");
  if (y0.is_string()) {
    const auto s = y0.get<std::string>();
    if (s == "steady") p.y0_mode = YStart::AdaptedSteadyState;
    else if (s == "michaelis") p.y0_mode = YStart::MichaelisStart;
    else throw ConfigError(path + ".y0", "expected a number, \"steady\" or \"michaelis\"");
  } else {
    p.y0_mode = YStart::Explicit;
    p.y0 = number_at(y0, path + ".y0");
    if (!(p.y0 >= 0.0)) throw ConfigError(path + ".y0", "must be >= 0");
  }
  return p;
}

inline std::vector<InitialPolicy> parse_inits(const CJson& j, const std::string& path, Eigen::Index n) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array");
  std::vector<InitialPolicy> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(parse_init(j[i], path + "[" + std::to_string(i) + "]", n, i));
  }
  return out;
}

}  // namespace detail

/// Parses and validates a configuration document. Errors carry the field path.
inline ExperimentConfig parse_config(const nlohmann::ordered_json& doc) {
  using detail::CJson;
  detail::check_keys(doc, "", {"name", "subsystem", "motifs", "inits", "T", "grid", "integrator", "out"});
  ExperimentConfig cfg;
  cfg.source = doc;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError("name", "expected a string");
    cfg.name = doc["name"].get<std::string>();
  }

  if (doc.contains("subsystem")) {
    const CJson& s = doc["subsystem"];
    detail::check_keys(s, "subsystem", {"A", "b"});
    if (!s.contains("A")) throw ConfigError("subsystem.A", "missing");
    if (!s.contains("b")) throw ConfigError("subsystem.b", "missing");
    Matrix a = detail::matrix_at(s["A"], "subsystem.A");
    Vector b = detail::vector_at(s["b"], "subsystem.b");
    try {
      cfg.subsystem = LinearSubsystem::validate(std::move(a), std::move(b));
    } catch (const Error& e) {
      throw ConfigError("subsystem", std::string(to_string(e.code())) + ": " + e.what());
    }
  }
  const Eigen::Index n = cfg.subsystem.dim();

  if (doc.contains("T")) cfg.sim.T = detail::number_at(doc["T"], "T");
  if (doc.contains("integrator")) {
    const CJson& in = doc["integrator"];
    detail::check_keys(in, "integrator", {"rtol", "atol", "n_samples", "dt_max", "x_floor"});
    if (in.contains("rtol")) cfg.sim.rtol = detail::number_at(in["rtol"], "integrator.rtol");
    if (in.contains("atol")) cfg.sim.atol = detail::number_at(in["atol"], "integrator.atol");
    if (in.contains("dt_max")) cfg.sim.dt_max = detail::number_at(in["dt_max"], "integrator.dt_max");
    if (in.contains("x_floor")) cfg.sim.x_floor = detail::number_at(in["x_floor"], "integrator.x_floor");
    if (in.contains("n_samples")) {
      if (!in["n_samples"].is_number_integer()) throw ConfigError("integrator.n_samples", "expected an integer");
      cfg.sim.n_samples = in["n_samples"].get<int>();
    }
  }
  try {
    cfg.sim.validate();
  } catch (const Error& e) {
    throw ConfigError("integrator", e.what());
  }

  if (doc.contains("grid")) {
    const CJson& g = doc["grid"];
    if (g.is_string()) {
      cfg.grid = parse_grid(g.get<std::string>());
    } else {
      detail::check_keys(g, "grid", {"min", "max", "points", "log"});
      if (g.contains("min")) cfg.grid.min = detail::number_at(g["min"], "grid.min");
      if (g.contains("max")) cfg.grid.max = detail::number_at(g["max"], "grid.max");
      if (g.contains("points")) {
        if (!g["points"].is_number_integer()) throw ConfigError("grid.points", "expected an integer");
        cfg.grid.points = g["points"].get<int>();
      }
      if (g.contains("log")) {
        if (!g["log"].is_boolean()) throw ConfigError("grid.log", "expected a boolean");
        cfg.grid.log = g["log"].get<bool>();
      }
      if (!(cfg.grid.min > 0.0) || !(cfg.grid.max > cfg.grid.min) || cfg.grid.points < 2) {
        throw ConfigError("grid", "need 0 < min < max and points >= 2");
      }
    }
  }

  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("out", "expected a string");
    cfg.out = doc["out"].get<std::string>();
  }

  std::vector<InitialPolicy> shared;
  if (doc.contains("inits")) shared = detail::parse_inits(doc["inits"], "inits", n);

  if (!doc.contains("motifs")) throw ConfigError("motifs", "missing");
  const CJson& ms = doc["motifs"];
  if (!ms.is_array() || ms.empty()) throw ConfigError("motifs", "expected a nonempty array");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string path = "motifs[" + std::to_string(i) + "]";
    const CJson& m = ms[i];
    detail::check_keys(m, path, {"kind", "c", "d", "beta", "K", "gamma", "inits"});
    if (!m.contains("kind") || !m["kind"].is_string()) throw ConfigError(path + ".kind", "expected a motif name");
    const auto kind = parse_kind(m["kind"].get<std::string>());
    if (!kind) throw ConfigError(path + ".kind", "unknown motif '" + m["kind"].get<std::string>() + "'");
    MotifParams p;
    p.c = m.contains("c") ? detail::vector_at(m["c"], path + ".c") : Vector(Vector::Ones(n));
    if (p.c.size() != n) throw ConfigError(path + ".c", "expected " + std::to_string(n) + " entries");
    p.K = is_scalar(*kind) ? 0.0 : 0.8;
    if (m.contains("d")) p.d = detail::number_at(m["d"], path + ".d");
    if (m.contains("beta")) p.beta = detail::number_at(m["beta"], path + ".beta");
    if (m.contains("K")) p.K = detail::number_at(m["K"], path + ".K");
    if (m.contains("gamma")) p.gamma = detail::number_at(m["gamma"], path + ".gamma");
    std::optional<MotifSpec> spec;
    try {
      spec = MotifSpec::make(*kind, p, cfg.sim.x_floor);
    } catch (const Error& e) {
      throw ConfigError(path, e.what());
    }
    std::vector<InitialPolicy> inits =
        m.contains("inits") ? detail::parse_inits(m["inits"], path + ".inits", n) : shared;
    if (inits.empty()) throw ConfigError(path + ".inits", "no initial conditions given");
    cfg.motifs.push_back(MotifEntry{*spec, std::move(inits)});
  }
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

/// The five-state benchmark: four IFFMs, three initial states, 121-point grid.
inline nlohmann::ordered_json preset_paper_sec5_json() {
  using J = nlohmann::ordered_json;
  J doc;
  doc["name"] = "paper-sec5";
  doc["subsystem"]["A"] = J::array({J::array({-3.0, 0.8, 0.0, 0.0, 0.0}),
                                    J::array({0.4, -2.6, 0.7, 0.0, 0.0}),
                                    J::array({0.0, 0.5, -2.8, 0.6, 0.0}),
                                    J::array({0.0, 0.0, 0.4, -2.3, 0.7}),
                                    J::array({0.0, 0.0, 0.0, 0.3, -1.7})});
  doc["subsystem"]["b"] = J::array({1.0, 0.8, 0.9, 0.7, 0.6});
  const J c = J::array({0.9, 0.7, 0.8, 0.6, 0.5});
  const J x0s = J::array({J::array({0.0, 0.0, 0.0, 0.0, 0.0}),
                          J::array({0.5, 0.6, 0.7, 0.8, 0.9}),
                          J::array({2.0, 2.1, 2.3, 2.4, 2.5})});
  doc["motifs"] = J::array();
  for (int i = 1; i <= 4; ++i) {
    J m;
    m["kind"] = "iffm-" + std::to_string(i);
    m["c"] = c;
    m["d"] = 1.2;
    m["beta"] = 1.5;
    m["K"] = 0.8;
    m["gamma"] = 0.8;
    m["inits"] = J::array();
    const char* y0 = (i == 2 || i == 4) ? "michaelis" : "steady";
    for (std::size_t k = 0; k < x0s.size(); ++k) {
      m["inits"].push_back(J{{"label", "x0_" + std::to_string(k + 1)}, {"x0", x0s[k]}, {"y0", y0}});
    }
    doc["motifs"].push_back(m);
  }
  doc["T"] = 1.5;
  doc["grid"] = J{{"min", 1e-3}, {"max", 1e3}, {"points", 121}, {"log", true}};
  doc["integrator"] = J{{"rtol", 1e-9}, {"atol", 1e-12}, {"n_samples", 2001}, {"x_floor", 1e-12}};
  doc["out"] = "results";
  return doc;
}

/// The eight unit scalar systems on x' = -x + u with x0 in {0.5, 2}, y0 = 1.
inline nlohmann::ordered_json preset_scalar_unit_json() {
  using J = nlohmann::ordered_json;
  J doc;
  doc["name"] = "scalar-unit";
  doc["subsystem"] = J{{"A", J::array({J::array({-1.0})})}, {"b", J::array({1.0})}};
  doc["motifs"] = J::array();
  for (int i = 1; i <= 8; ++i) doc["motifs"].push_back(J{{"kind", "scalar-" + std::to_string(i)}});
  doc["inits"] = J::array({J{{"label", "x0_0.5"}, {"x0", J::array({0.5})}, {"y0", 1.0}},
                           J{{"label", "x0_2"}, {"x0", J::array({2.0})}, {"y0", 1.0}}});
  doc["T"] = 1.5;
  doc["grid"] = J{{"min", 1e-3}, {"max", 1e3}, {"points", 121}, {"log", true}};
  doc["out"] = "results";
  return doc;
}

inline std::vector<std::string> preset_names() { return {"paper-sec5", "scalar-unit"}; }

inline ExperimentConfig preset(const std::string& name) {
  if (name == "paper-sec5") return parse_config(preset_paper_sec5_json());
  if (name == "scalar-unit") return parse_config(preset_scalar_unit_json());
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

}  // namespace iffm
