#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"

using namespace iffm;
using namespace iffm::testing;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "iffm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("iffm_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST(Cli, ListShowsCrossWalk) {
  const auto r = run({"list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("scalar-5 <=> iffm-1"), std::string::npos);
  EXPECT_NE(r.out.find("y' = x/u - y"), std::string::npos);
}

TEST(Cli, ListUnknownSuggests) {
  const auto r = run({"list", "scalar-0"});
  EXPECT_NE(r.code, 0);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["suggestion"].get<std::string>().substr(0, 7), "scalar-");
}

TEST(Cli, SimulateWritesDefaultGrid) {
  const auto dir = scratch("sim");
  const auto file = (dir / "t.csv").string();
  const auto r = run({"simulate", "--preset", "paper-sec5", "--motif", "iffm-1", "--u", "1", "--file", file});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(file);
  const auto t = read_csv(is);
  EXPECT_EQ(t.rows.size(), 2001u);
}

TEST(Cli, SimulateRejectsNonPositiveInput) {
  const auto r = run({"simulate", "--preset", "paper-sec5", "--motif", "iffm-1", "--u", "0"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, DomainViolationExitCode) {
  const auto dir = scratch("dv");
  const auto cfg = write_file(dir / "c.json", R"({"subsystem": {"A": [[-1]], "b": [1]},
    "motifs": [{"kind": "scalar-4"}], "inits": [{"x0": [0], "y0": 1}], "out": ")" + dir.string() + R"("})");
  const auto r = run({"simulate", "--config", cfg, "--motif", "scalar-4", "--u", "1"});
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "DomainViolation");
  EXPECT_EQ(j["t"], 0.0);
}

TEST(Cli, MalformedConfigReportsFieldPath) {
  const auto dir = scratch("bad");
  const auto cfg = write_file(dir / "c.json", R"({"subsystem": {"A": [[-1]], "b": [1]},
    "motifs": [{"kind": "scalar-1", "d": "x"}], "inits": [{"x0": [1]}]})");
  const auto r = run({"sweep", "--config", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["field"], "motifs[0].d");

  const auto broken = write_file(dir / "b.json", "{not json");
  EXPECT_EQ(run({"classify", "--config", broken}).code, 1);
  EXPECT_EQ(run({"classify", "--config", (dir / "missing.json").string()}).code, 1);
  EXPECT_EQ(run({"classify", "--preset", "nope"}).code, 1);
  EXPECT_EQ(run({"classify", "--preset", "paper-sec5", "--grid", "1:0:3:log"}).code, 1);
}

TEST(Cli, ConfigParsing) {
  const auto cfg = preset("paper-sec5");
  EXPECT_EQ(cfg.motifs.size(), 4u);
  EXPECT_EQ(cfg.grid.values().size(), 121u);
  EXPECT_EQ(cfg.motifs[0].inits.size(), 3u);
  EXPECT_EQ(cfg.motifs[1].inits[0].y0_mode, YStart::MichaelisStart);
  EXPECT_DOUBLE_EQ(cfg.motifs[0].motif.params().gamma, 0.8);
  EXPECT_EQ(cfg.find("vec-5"), &cfg.motifs[0]);

  const auto g = parse_grid("0.01:100:9:lin");
  EXPECT_FALSE(g.log);
  EXPECT_EQ(g.points, 9);
  EXPECT_THROW(parse_grid("1:2:3"), ConfigError);

  try {
    parse_config_text(R"({"subsystem": {"A": [[1]], "b": [1]}, "motifs": [{"kind": "scalar-1"}], "inits": [{"x0": [1]}]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "subsystem");
  }
  try {
    parse_config_text(R"({"motifs": [{"kind": "scalar-1"}], "inits": [{"x0": [1], "y0": "later"}]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "inits[0].y0");
  }
  try {
    parse_config_text(R"({"motifs": [{"kind": "scalar-1"}], "inits": [{"x0": [1]}], "integrator": {"rtol": 0.1}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "integrator");
  }
}

TEST(Cli, VerifyAndClassifySmallConfig) {
  const auto dir = scratch("small");
  const auto cfg = write_file(dir / "c.json", R"({"subsystem": {"A": [[-1]], "b": [1]},
    "motifs": [{"kind": "scalar-1"}, {"kind": "scalar-7"}],
    "inits": [{"x0": [2], "y0": 1}], "grid": {"min": 0.01, "max": 100, "points": 21, "log": true}})");
  const auto v = run({"verify", "--config", cfg, "--out", dir.string()});
  EXPECT_EQ(v.code, 0) << v.out << v.err;
  const auto report = nlohmann::json::parse(std::ifstream(dir / "verify_report.json"));
  EXPECT_TRUE(report["pass"].get<bool>());

  const auto c = run({"classify", "--config", cfg, "--out", dir.string()});
  EXPECT_EQ(c.code, 0) << c.err;
  const auto verdicts = nlohmann::json::parse(std::ifstream(dir / "verdicts.json"));
  EXPECT_EQ(verdicts[0]["cdr"], "nonincreasing");
  EXPECT_EQ(verdicts[1]["cdr"], "nonmonotone");

  const auto s = run({"sweep", "--config", cfg, "--out", dir.string(), "--jobs", "2"});
  EXPECT_EQ(s.code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "scalar-7_cDR.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "scalar-7_init1_sweep.csv"));
}

TEST(Cli, GlobalFlagsOverrideConfig) {
  const auto dir = scratch("flags");
  const auto r = run({"classify", "--preset", "scalar-unit", "--grid", "0.1:10:5:log", "--rtol", "1e-8", "--atol",
                      "1e-11", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto verdicts = nlohmann::json::parse(std::ifstream(dir / "verdicts.json"));
  EXPECT_EQ(verdicts.size(), 8u);
}
