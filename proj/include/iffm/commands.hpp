#pragma once

// Command-line front end. run_cli returns the process exit code:
//   0 ok, 1 configuration error, 2 domain violation, 3 verification failure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iffm/classify.hpp"
#include "iffm/config.hpp"
#include "iffm/oracle.hpp"
#include "iffm/report.hpp"

namespace iffm {

inline constexpr const char* kToolName = "iffm";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitDomain = 2, kExitVerify = 3 };

// ---------------------------------------------------------------------------
// Verification suite

inline constexpr double kVerifyInputs[] = {0.1, 1.0, 10.0};

/// Oracle checks for the first initial condition of every motif at u in {0.1, 1, 10}.
inline std::vector<OracleReport> run_verification(const ExperimentConfig& cfg, int jobs = 1) {
  struct Item {
    const MotifEntry* entry;
    double u;
  };
  std::vector<Item> items;
  for (const auto& m : cfg.motifs)
    for (double u : kVerifyInputs) items.push_back({&m, u});

  std::vector<std::vector<OracleReport>> slots(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    const MotifSpec& motif = items[i].entry->motif;
    const InitialPolicy& init = items[i].entry->inits.front();
    const double u = items[i].u;
    std::ostringstream tag;
    tag << motif.name() << '/' << init.label << "/u=" << u << '/';
    auto& out = slots[i];
    try {
      const ResolvedInit r = resolve(init, cfg.subsystem, motif, u);
      const Trajectory tr = simulate(cfg.subsystem, motif, u, r, cfg.sim);
      const KernelProfile ker = kernel(tr, cfg.sim);

      const double h = 1e-4 * std::max(u, 1.0);
      const auto q_fd = fd_sensitivity(cfg.subsystem, motif, u, r, cfg.sim, h);
      out.push_back(make_report(tag.str() + "q(T) vs finite difference", tr.q.back(), q_fd.back(), 1e-5, 1e-8));

      const double rich = richardson_dcdr(cfg.subsystem, motif, u, r, cfg.sim);
      out.push_back(make_report(tag.str() + "int lambda g vs Richardson", ker.lambda_g_integral, rich, 1e-6, 1e-8));
      out.push_back(make_report(tag.str() + "int q vs int lambda g", tr.int_q.back(), ker.lambda_g_integral, 1e-7, 1.0));

      const double probe = 0.5 * tr.T() / 1.5;
      out.push_back(make_report(tag.str() + "lambda(" + fmt17(probe) + ") vs nested quadrature",
                                ker.lambda_at(probe), lambda_by_quadrature(tr, probe), 1e-7, 1.0));

      if (is_scalar(motif.kind()) && cfg.subsystem.dim() == 1 && cfg.subsystem.A()(0, 0) == -1.0 &&
          cfg.subsystem.b()(0) == 1.0) {
        const auto cf = closed_form_scalar(motif.kind(), u, r.x0(0), tr.T());
        out.push_back(make_report(tag.str() + "x(T) vs closed form", tr.x(tr.size() - 1, 0), cf.x, 1e-9, 1.0));
        out.push_back(make_report(tag.str() + "p(T) vs closed form", tr.p(tr.size() - 1, 0), cf.p, 1e-9, 1.0));
      } else {
        const Propagation pr = cfg.subsystem.propagate(u, r.x0, tr.T());
        const Vector xe = tr.x.row(tr.size() - 1).transpose();
        const Vector pe = tr.p.row(tr.size() - 1).transpose();
        out.push_back(make_report(tag.str() + "x(T) vs matrix exponential", 0.0, (xe - pr.x).cwiseAbs().maxCoeff(), 1e-8, 1.0));
        out.push_back(make_report(tag.str() + "p(T) vs matrix exponential", 0.0, (pe - pr.p).cwiseAbs().maxCoeff(), 1e-8, 1.0));
      }
    } catch (const DomainViolation& e) {
      OracleReport r;
      r.name = tag.str() + "domain violation: " + e.what();
      r.pass = false;
      out.push_back(r);
    }
  });
  std::vector<OracleReport> all;
  for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
  return all;
}

// ---------------------------------------------------------------------------
// Helpers

namespace cli_detail {

struct GlobalOptions {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  int jobs = 1;
  std::optional<double> rtol, atol;
  std::string grid;
};

inline std::string edit_suggestion(const std::string& name) {
  std::vector<std::string> names;
  for (MotifKind k : kAllKinds) names.push_back(kind_name(k));
  for (int i = 1; i <= 8; ++i) names.push_back("vec-" + std::to_string(i));
  auto distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      cur[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
      }
      std::swap(prev, cur);
    }
    return prev[b.size()];
  };
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& n : names) {
    const std::size_t d = distance(name, n);
    if (d < best_d) {
      best_d = d;
      best = n;
    }
  }
  return best;
}

inline ExperimentConfig load(const GlobalOptions& g, const std::string& default_preset = {}) {
  if (!g.config_path.empty() && !g.preset_name.empty()) {
    throw ConfigError("--config", "use either --config or --preset, not both");
  }
  nlohmann::ordered_json doc;
  if (!g.config_path.empty()) {
    std::ifstream is(g.config_path);
    if (!is) throw ConfigError("--config", "cannot open '" + g.config_path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    try {
      doc = nlohmann::ordered_json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
  } else {
    const std::string name = g.preset_name.empty() ? default_preset : g.preset_name;
    if (name.empty()) throw ConfigError("--config", "a --config file or --preset is required");
    if (name == "paper-sec5") doc = preset_paper_sec5_json();
    else if (name == "scalar-unit") doc = preset_scalar_unit_json();
    else throw ConfigError("--preset", "unknown preset '" + name + "'");
  }
  if (g.rtol) doc["integrator"]["rtol"] = *g.rtol;
  if (g.atol) doc["integrator"]["atol"] = *g.atol;
  if (!g.grid.empty()) {
    const GridSpec gs = parse_grid(g.grid);
    doc["grid"] = nlohmann::ordered_json{{"min", gs.min}, {"max", gs.max}, {"points", gs.points}, {"log", gs.log}};
  }
  if (!g.out_dir.empty()) doc["out"] = g.out_dir;
  if (g.jobs < 1) throw ConfigError("--jobs", "must be at least 1");
  return parse_config(doc);
}

inline std::string safe_label(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

inline Json provenance(const ExperimentConfig& cfg) {
  Json p;
  p["tool"] = kToolName;
  p["version"] = kToolVersion;
  p["config"] = cfg.name;
  p["integrator"] = Json{{"method", "Dormand-Prince 5(4), dense output"},
                         {"rtol", cfg.sim.rtol},
                         {"atol", cfg.sim.atol},
                         {"n_samples", cfg.sim.n_samples},
                         {"T", cfg.sim.T},
                         {"x_floor", cfg.sim.x_floor}};
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  p["generated_at"] = buf;
  return p;
}

inline std::vector<Verdict> classify_all(const ExperimentConfig& cfg, int jobs) {
  VerdictOptions opt;
  opt.u_grid = cfg.grid.values();
  opt.jobs = jobs;
  std::vector<Verdict> out;
  for (const auto& m : cfg.motifs) out.push_back(verdict(m.motif, cfg.subsystem, m.inits, cfg.sim, opt));
  return out;
}

inline void write_sweeps(const std::filesystem::path& dir, const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts) {
    std::vector<SweepResult> sweeps;
    for (const auto& iv : v.per_init) {
      const auto stem = dir / (v.motif + "_" + safe_label(iv.label) + "_sweep");
      std::ostringstream csv;
      write_sweep_csv(csv, iv.sweep);
      write_text(stem.string() + ".csv", csv.str());
      write_json(stem.string() + ".json", to_json(iv.sweep));
      sweeps.push_back(iv.sweep);
    }
    emit_figure_data(dir, v.motif, sweeps);
  }
}

inline bool has_all_iffm(const std::vector<Verdict>& verdicts) {
  int mask = 0;
  for (const auto& v : verdicts)
    if (auto k = parse_kind(v.motif))
      if (auto i = iffm_number(*k)) mask |= 1 << *i;
  return mask == 0b11110;
}

inline void write_verdicts(const std::filesystem::path& dir, const std::vector<Verdict>& verdicts,
                           std::ostream& out) {
  Json list = Json::array();
  for (const auto& v : verdicts) list.push_back(to_json(v));
  write_json(dir / "verdicts.json", list);
  if (has_all_iffm(verdicts)) {
    const Table3 t = emit_table3(verdicts);
    write_json(dir / "table3.json", t.json);
    write_text(dir / "table3.txt", t.text);
    out << t.text;
  } else {
    for (const auto& v : verdicts) {
      out << v.motif << ": DR " << to_string(v.dr) << ", cDR " << to_string(v.cdr) << ", certificate "
          << to_string(v.certificate.kind) << '\n';
    }
  }
}

/// Returns true when every report passes.
inline bool write_verification(const std::filesystem::path& dir, const std::vector<OracleReport>& reports,
                               std::ostream& out) {
  const Json j = to_json(reports);
  write_json(dir / "verify_report.json", j);
  std::size_t failed = j["failed"].get<std::size_t>();
  for (const auto& r : reports)
    if (!r.pass) out << "FAIL " << r.name << " rel_gap=" << fmt17(r.rel_gap) << " tol=" << r.tol << '\n';
  out << "verification: " << reports.size() - failed << "/" << reports.size() << " passed\n";
  return failed == 0;
}

inline void print_catalog(std::ostream& out, std::optional<MotifKind> only = std::nullopt) {
  for (MotifKind k : kAllKinds) {
    if (only && k != *only) continue;
    std::string name = kind_name(k);
    std::string cross;
    const int sys = system_number(k);
    if (is_scalar(k)) {
      cross = "system " + std::to_string(sys);
      if (auto i = iffm_number(static_cast<MotifKind>(8 + sys - 1))) {
        cross = name + " <=> iffm-" + std::to_string(*i);
      }
    } else if (auto i = iffm_number(k)) {
      cross = "iffm-" + std::to_string(*i) + " = vec-" + std::to_string(sys) + " <=> scalar-" + std::to_string(sys);
    } else {
      cross = "vec-" + std::to_string(sys) + " <=> scalar-" + std::to_string(sys);
    }
    char line[200];
    std::snprintf(line, sizeof line, "%-9s %-32s %s\n", name.c_str(), cross.c_str(), equation(k).c_str());
    out << line;
  }
}

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// Entry point

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Dose-response sensitivity and monotonicity analysis for incoherent feedforward motifs"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Experiment configuration (JSON)");
  app.add_option("--preset", g.preset_name, "Built-in configuration: paper-sec5 or scalar-unit");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--jobs", g.jobs, "Worker threads");
  app.add_option("--rtol", g.rtol, "Relative integrator tolerance");
  app.add_option("--atol", g.atol, "Absolute integrator tolerance");
  app.add_option("--grid", g.grid, "Input grid as min:max:points:log");
  app.fallthrough();

  auto* list = app.add_subcommand("list", "Print the motif catalog");
  std::string list_name;
  list->add_option("name", list_name, "Show a single motif");

  auto* sim = app.add_subcommand("simulate", "Write one trajectory as CSV");
  std::string sim_motif;
  double sim_u = 0.0;
  int sim_init = 1;
  std::string sim_file;
  sim->add_option("--motif", sim_motif, "Motif name")->required();
  sim->add_option("--u", sim_u, "Input level")->required();
  sim->add_option("--init", sim_init, "Initial condition index (1-based)");
  sim->add_option("--file", sim_file, "Output file (default <out>/<motif>_u<u>.csv)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Dose-response sweeps and figure data");
  auto* classify_cmd = app.add_subcommand("classify", "Monotonicity verdicts");
  auto* verify_cmd = app.add_subcommand("verify", "Oracle suite");
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Full benchmark run (default preset paper-sec5)");

  auto error_json = [&](const char* code, const std::string& message, const Json& extra = {}) {
    Json j;
    j["error"] = code;
    j["message"] = message;
    if (extra.is_object())
      for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    err << j.dump() << '\n';
  };

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      error_json("ConfigError", e.what());
      return kExitConfig;
    }

    if (list->parsed()) {
      if (list_name.empty()) {
        print_catalog(out);
        return kExitOk;
      }
      const auto kind = parse_kind(list_name);
      if (!kind) {
        error_json("UnknownMotif", "unknown motif '" + list_name + "'",
                   Json{{"suggestion", edit_suggestion(list_name)}});
        return kExitConfig;
      }
      print_catalog(out, *kind);
      return kExitOk;
    }

    if (sim->parsed()) {
      const ExperimentConfig cfg = load(g);
      const MotifEntry* entry = cfg.find(sim_motif);
      if (!entry) throw ConfigError("--motif", "'" + sim_motif + "' is not in the configuration");
      if (!(sim_u > 0.0) || !std::isfinite(sim_u)) throw ConfigError("--u", "must be positive");
      if (sim_init < 1 || sim_init > static_cast<int>(entry->inits.size())) {
        throw ConfigError("--init", "must be between 1 and " + std::to_string(entry->inits.size()));
      }
      const Trajectory tr = simulate(cfg.subsystem, entry->motif, sim_u, entry->inits[sim_init - 1], cfg.sim);
      const KernelProfile ker = kernel(tr, cfg.sim);
      const std::filesystem::path path =
          sim_file.empty() ? std::filesystem::path(cfg.out) / (entry->motif.name() + "_u" + fmt17(sim_u) + ".csv")
                           : std::filesystem::path(sim_file);
      std::ostringstream csv;
      write_trajectory_csv(csv, tr, &ker);
      write_text(path, csv.str());
      out << path.string() << '\n';
      return kExitOk;
    }

    const bool reproduce = reproduce_cmd->parsed();
    const ExperimentConfig cfg = load(g, reproduce ? "paper-sec5" : "");
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);

    if (verify_cmd->parsed()) {
      const bool ok = write_verification(dir, run_verification(cfg, g.jobs), out);
      return ok ? kExitOk : kExitVerify;
    }

    const std::vector<Verdict> verdicts = classify_all(cfg, g.jobs);
    if (sweep_cmd->parsed()) {
      write_sweeps(dir, verdicts);
      out << "wrote sweeps for " << verdicts.size() << " motif(s) to " << dir.string() << '\n';
      return kExitOk;
    }
    if (classify_cmd->parsed()) {
      write_verdicts(dir, verdicts, out);
      return kExitOk;
    }
    // reproduce
    write_json(dir / "config.json", cfg.source);
    write_sweeps(dir, verdicts);
    write_verdicts(dir, verdicts, out);
    const bool ok = write_verification(dir, run_verification(cfg, g.jobs), out);
    write_json(dir / "provenance.json", provenance(cfg));
    return ok ? kExitOk : kExitVerify;
  } catch (const ConfigError& e) {
    error_json("ConfigError", e.what(), Json{{"field", e.field()}});
    return kExitConfig;
  } catch (const DomainViolation& e) {
    error_json("DomainViolation", e.what(), Json{{"t", json_number(e.time())}});
    return kExitDomain;
  } catch (const Error& e) {
    const bool numeric = e.code() == ErrorCode::StepFailure;
    error_json(to_string(e.code()), e.what());
    return numeric ? kExitDomain : kExitConfig;
  } catch (const std::exception& e) {
    error_json("Error", e.what());
    return kExitConfig;
  }
}

}  // namespace iffm
