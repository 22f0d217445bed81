#pragma once

// CSV/JSON emission: trajectories, sweeps, figure series, verdict tables and
// oracle reports. Numbers in CSV use 17 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iffm/classify.hpp"
#include "iffm/oracle.hpp"

namespace iffm {

using Json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------------------
// CSV

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const KernelProfile* ker = nullptr) {
  os << "t";
  for (Eigen::Index i = 0; i < tr.n; ++i) os << ",x_" << i + 1;
  for (Eigen::Index i = 0; i < tr.n; ++i) os << ",p_" << i + 1;
  os << ",y,q,int_y,G,a,g,lambda\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << fmt17(tr.t[k]);
    for (Eigen::Index i = 0; i < tr.n; ++i) os << ',' << fmt17(tr.x(k, i));
    for (Eigen::Index i = 0; i < tr.n; ++i) os << ',' << fmt17(tr.p(k, i));
    os << ',' << fmt17(tr.y[k]) << ',' << fmt17(tr.q[k]) << ',' << fmt17(tr.int_y[k]) << ','
       << fmt17(tr.G[k]) << ',' << fmt17(tr.a[k]) << ',' << fmt17(tr.g[k]) << ','
       << fmt17(ker ? ker->lambda[k] : NAN) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
  os << "u,DR,cDR,d_cdr_q,d_cdr_kernel,d_cdr_fd,status\n";
  for (const auto& e : sw.entries) {
    os << fmt17(e.u) << ',' << fmt17(e.dr) << ',' << fmt17(e.cdr) << ',' << fmt17(e.d_cdr_q) << ','
       << fmt17(e.d_cdr_kernel) << ',' << fmt17(e.d_cdr_fd) << ',' << to_string(e.status) << '\n';
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<double> column(const std::string& name) const {
    std::size_t j = 0;
    while (j < header.size() && header[j] != name) ++j;
    if (j == header.size()) throw Error(ErrorCode::InvalidArgument, "no column " + name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::strtod(r.at(j).c_str(), nullptr));
    return out;
  }
};

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (std::getline(is, line)) t.header = split(line);
  while (std::getline(is, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

/// `<motif>_DR.csv` and `<motif>_cDR.csv`, one value column per sweep.
inline std::vector<std::filesystem::path> emit_figure_data(const std::filesystem::path& dir,
                                                           const std::string& motif,
                                                           const std::vector<SweepResult>& sweeps) {
  if (sweeps.empty()) return {};
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const bool cumulative : {false, true}) {
    const auto path = dir / (motif + (cumulative ? "_cDR.csv" : "_DR.csv"));
    std::ofstream os(path);
    os << "u";
    for (std::size_t j = 0; j < sweeps.size(); ++j) os << ",value_init" << j + 1;
    os << '\n';
    for (std::size_t k = 0; k < sweeps.front().entries.size(); ++k) {
      os << fmt17(sweeps.front().entries[k].u);
      for (const auto& sw : sweeps) {
        const auto& e = sw.entries.at(k);
        os << ',' << fmt17(cumulative ? e.cdr : e.dr);
      }
      os << '\n';
    }
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const SweepResult& sw) {
  Json entries = Json::array();
  for (const auto& e : sw.entries) {
    Json j;
    j["u"] = json_number(e.u);
    j["DR"] = json_number(e.dr);
    j["cDR"] = json_number(e.cdr);
    j["d_cdr_q"] = json_number(e.d_cdr_q);
    j["d_cdr_kernel"] = json_number(e.d_cdr_kernel);
    j["d_cdr_fd"] = json_number(e.d_cdr_fd);
    j["status"] = to_string(e.status);
    if (!e.message.empty()) j["message"] = e.message;
    entries.push_back(j);
  }
  Json out;
  out["motif"] = sw.motif;
  out["init"] = sw.init_label;
  out["max_identity_gap"] = json_number(sw.max_identity_gap());
  out["max_fd_gap"] = json_number(sw.max_fd_gap());
  out["warnings"] = sw.warnings;
  out["entries"] = entries;
  return out;
}

inline Json to_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  Json j;
  j["u_minus"] = w->u_minus;
  j["d_cdr_q_minus"] = w->d_minus;
  j["d_cdr_fd_minus"] = w->fd_minus;
  j["u_plus"] = w->u_plus;
  j["d_cdr_q_plus"] = w->d_plus;
  j["d_cdr_fd_plus"] = w->fd_plus;
  return j;
}

inline Json to_json(const Certificate& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["direction"] = to_string(c.direction);
  return j;
}

inline Json to_json(const Verdict& v) {
  Json per = Json::array();
  for (const auto& iv : v.per_init) {
    Json j;
    j["init"] = iv.label;
    j["dr"] = to_string(iv.dr);
    j["cdr"] = to_string(iv.cdr);
    j["certificate"] = to_json(iv.certificate);
    j["witness"] = to_json(iv.witness);
    j["a_sign"] = to_string(iv.a_sign);
    j["G_sign"] = to_string(iv.G_sign);
    per.push_back(j);
  }
  Json out;
  out["motif"] = v.motif;
  out["dr"] = to_string(v.dr);
  out["cdr"] = to_string(v.cdr);
  out["certificate"] = to_json(v.certificate);
  out["witness"] = to_json(v.witness);
  out["a_sign"] = to_string(v.a_sign);
  out["G_sign"] = to_string(v.G_sign);
  out["per_init"] = per;
  return out;
}

inline Json to_json(const OracleReport& r) {
  Json j;
  j["name"] = r.name;
  j["engine"] = json_number(r.engine);
  j["oracle"] = json_number(r.oracle);
  j["abs_gap"] = json_number(r.abs_gap);
  j["rel_gap"] = json_number(r.rel_gap);
  j["tol"] = r.tol;
  j["scale_floor"] = r.scale_floor;
  j["pass"] = r.pass;
  return j;
}

inline Json to_json(const std::vector<OracleReport>& reports) {
  Json list = Json::array();
  std::size_t failed = 0;
  for (const auto& r : reports) {
    list.push_back(to_json(r));
    if (!r.pass) ++failed;
  }
  Json out;
  out["total"] = reports.size();
  out["failed"] = failed;
  out["pass"] = failed == 0;
  out["reports"] = list;
  return out;
}

// ---------------------------------------------------------------------------
// Monotonicity table

inline std::string table_label(Direction d) {
  if (is_monotone(d)) return "Monotone";
  if (d == Direction::Nonmonotone) return "Nonmonotone";
  return "Inconclusive";
}

struct Table3 {
  std::string text;
  Json json;
};

/// Rows IFFM1..IFFM4: System, DR, cDR, a_u sign, G_u sign.
inline Table3 emit_table3(const std::vector<Verdict>& verdicts) {
  std::map<int, const Verdict*> by_index;
  for (const auto& v : verdicts) {
    if (auto kind = parse_kind(v.motif)) {
      if (auto i = iffm_number(*kind)) by_index[*i] = &v;
    }
  }
  for (int i = 1; i <= 4; ++i) {
    if (!by_index.count(i)) {
      throw Error(ErrorCode::MissingVerdict, "no verdict for IFFM" + std::to_string(i));
    }
  }
  Table3 t;
  t.json = Json::array();
  char line[160];
  std::snprintf(line, sizeof line, "%-8s | %-12s | %-12s | %-6s | %-13s\n", "System", "DR", "cDR", "a_u", "G_u");
  t.text += line;
  t.text += std::string(63, '-') + "\n";
  for (int i = 1; i <= 4; ++i) {
    const Verdict& v = *by_index[i];
    const std::string system = "IFFM" + std::to_string(i);
    std::snprintf(line, sizeof line, "%-8s | %-12s | %-12s | %-6s | %-13s\n", system.c_str(),
                  table_label(v.dr).c_str(), table_label(v.cdr).c_str(), to_string(v.a_sign),
                  to_string(v.G_sign));
    t.text += line;
    Json row;
    row["system"] = system;
    row["motif"] = v.motif;
    row["DR"] = table_label(v.dr);
    row["cDR"] = table_label(v.cdr);
    row["dr_direction"] = to_string(v.dr);
    row["cdr_direction"] = to_string(v.cdr);
    row["a_u"] = to_string(v.a_sign);
    row["G_u"] = to_string(v.G_sign);
    row["certificate"] = to_json(v.certificate);
    row["witness"] = to_json(v.witness);
    t.json.push_back(row);
  }
  return t;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace iffm
