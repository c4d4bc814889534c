#include "doctest.h"
#include "gtruth/workspace.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gtruth;
using nlohmann::json;

namespace {
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

void write_spec(const std::filesystem::path& file, const std::string& id,
                double duration, std::uint64_t seed) {
  json spec;
  spec["id"] = id;
  spec["path"] = {{"kind", "line"}, {"duration", duration}};
  spec["noise"] = {{"seed", seed}};
  std::ofstream out(file);
  out << spec.dump(2) << "\n";
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}
}  // namespace

TEST_CASE("workspace config round trips and keeps experiments sorted") {
  TempDir dir("gtruth_ws_cfg");
  WorkspaceConfig cfg;
  ExperimentConfig b;
  b.id = "beta";
  SystemConfig sys;
  sys.logs = {"raw/a.csv", "raw/b.csv", "raw/c.csv"};
  sys.body = "calib/body.csv";
  sys.origin = "calib/origin.csv";
  b.gnss = sys;
  cfg.upsert(b);
  ExperimentConfig a;
  a.id = "alpha";
  a.rts = sys;
  a.rts->gcp = {"calib/g0.csv", "calib/g1.csv", "calib/g2.csv"};
  a.rts->stations = {"s0", "s1", "s2"};
  cfg.upsert(a);
  cfg.save(dir.path);

  const WorkspaceConfig back = WorkspaceConfig::load(dir.path);
  REQUIRE(back.experiments.size() == 2);
  CHECK(back.experiments[0].id == "alpha");  // sorted on upsert
  CHECK(back.experiments[1].id == "beta");
  CHECK(back.experiments[0].rts.has_value());
  CHECK_FALSE(back.experiments[0].gnss.has_value());
  CHECK(back.experiments[1].gnss->origin == "calib/origin.csv");
  CHECK(back.require("alpha").rts->stations.size() == 3);
  CHECK_THROWS_AS(back.require("gamma"), ConfigError);
  CHECK_THROWS_AS(back.experiments[0].require(SystemKind::gnss), ConfigError);

  // upsert replaces in place
  a.rts->body = "calib/other.csv";
  WorkspaceConfig mutated = back;
  mutated.upsert(a);
  CHECK(mutated.experiments.size() == 2);
  CHECK(mutated.experiments[0].rts->body == "calib/other.csv");
}

TEST_CASE("loading a missing or invalid config fails cleanly") {
  TempDir dir("gtruth_ws_nocfg");
  CHECK_THROWS_AS(WorkspaceConfig::load(dir.path), ConfigError);
  {
    std::ofstream out(dir.path / "config.json");
    out << "{\"schema_version\": 99, \"experiments\": []}\n";
  }
  CHECK_THROWS_AS(WorkspaceConfig::load(dir.path), ConfigError);
  {
    std::ofstream out(dir.path / "config.json");
    out << "not json at all\n";
  }
  CHECK_THROWS_AS(WorkspaceConfig::load(dir.path), ConfigError);
}

TEST_CASE("full pipeline over a temp workspace") {
  TempDir dir("gtruth_ws_pipe");
  const auto spec_a = dir.path / "spec_a.json";
  const auto spec_b = dir.path / "spec_b.json";
  write_spec(spec_a, "expa", 40.0, 11);
  write_spec(spec_b, "expb", 40.0, 22);
  const auto ws = dir.path / "ws";

  cmd_synth(spec_a, ws, std::nullopt);
  cmd_synth(spec_b, ws, std::nullopt);
  CHECK(std::filesystem::exists(ws / "config.json"));

  cmd_calibrate(ws, "expa");
  cmd_calibrate(ws, "expb");
  const json calib = read_json(ws / "expa" / "derived" / "calibration.json");
  CHECK(calib["schema_version"] == 1);
  REQUIRE(calib["rts"]["stations"].size() == 3);
  CHECK(calib["rts"]["stations"][0]["rmse"] == 0.0);
  CHECK(calib["rts"]["stations"][1]["rmse"].get<double>() < 1e-9);
  CHECK(calib["gnss"]["origin"]["height"] == 98.0);

  PipelineOptions options;
  cmd_reconstruct(ws, "expa", SystemKind::rts, options);
  cmd_reconstruct(ws, "expa", SystemKind::gnss, options);
  cmd_reconstruct(ws, "expb", SystemKind::rts, options);
  cmd_reconstruct(ws, "expb", SystemKind::gnss, options);

  const json run = read_json(ws / "expa" / "derived" / "rts" / "run.json");
  CHECK(run["system"] == "rts");
  CHECK(run["options"]["max_gap"] == 1.0);
  CHECK(run["options"]["reference"] == "stream0");
  CHECK(run["triplets"].get<int>() > 90);
  CHECK(run["poses"] == run["triplets"]);
  CHECK(run["streams"].size() == 3);

  cmd_evaluate(ws, "expa", options);
  const json report = read_json(ws / "expa" / "reports" / "report.json");
  CHECK(report["metadata"]["quantile_convention"] == "type7_linear");
  CHECK(report["metadata"]["exclude_outliers"] == false);
  const double rts_med = report["systems"]["rts"]["pooled"]["median"];
  const double gnss_med = report["systems"]["gnss"]["pooled"]["median"];
  CHECK(rts_med > 0.0005);
  CHECK(rts_med < 0.006);
  CHECK(gnss_med > rts_med);  // noisier system scores worse
  CHECK(report["systems"]["rts"]["reconstruction"]["admit_float"] == false);
  CHECK(std::filesystem::exists(ws / "expa" / "reports" /
                                "intra_errors_rts.csv"));
  CHECK(std::filesystem::exists(ws / "expa" / "reports" /
                                "intra_boxplot_gnss.csv"));

  // self-comparison: every disparity exactly zero
  cmd_compare(ws, "expa", "expa", options);
  const json self =
      read_json(ws / "expa" / "reports" / "compare_expa_vs_expa.json");
  for (const char* system : {"rts", "gnss"}) {
    const json& sys = self["systems"][system];
    CHECK(sys["summary"]["median"] == 0.0);
    CHECK(sys["summary"]["iqr"] == 0.0);
    CHECK(sys["matches"].get<std::size_t>() > 90);
    for (const auto& d : sys["raw"]["d01"]) CHECK(d.get<double>() == 0.0);
  }

  // cross-comparison produces a plausible nonzero disparity
  cmd_compare(ws, "expa", "expb", options);
  const json cross =
      read_json(ws / "expa" / "reports" / "compare_expa_vs_expb.json");
  CHECK(cross["metadata"]["radius"] == 2.0);
  CHECK(cross["metadata"]["match_anchor"] == "target0");
  CHECK(cross["systems"]["rts"]["summary"]["median"].get<double>() > 0.0);
  CHECK(std::filesystem::exists(ws / "expa" / "reports" /
                                "compare_expa_vs_expb_rts.csv"));

  // evaluate before reconstruct is a config error
  write_spec(dir.path / "spec_c.json", "expc", 10.0, 33);
  cmd_synth(dir.path / "spec_c.json", ws, std::nullopt);
  CHECK_THROWS_AS(cmd_evaluate(ws, "expc", options), ConfigError);
  // reconstruct before calibrate too
  CHECK_THROWS_AS(cmd_reconstruct(ws, "expc", SystemKind::rts, options),
                  ConfigError);
}

TEST_CASE("centroid anchor and outlier exclusion options round trip") {
  TempDir dir("gtruth_ws_opts");
  const auto ws = dir.path / "ws";
  write_spec(dir.path / "spec.json", "exp", 30.0, 5);
  cmd_synth(dir.path / "spec.json", ws, std::nullopt);
  cmd_calibrate(ws, "exp");
  PipelineOptions options;
  cmd_reconstruct(ws, "exp", SystemKind::rts, options);

  options.match_anchor = MatchAnchorKind::centroid;
  options.exclude_outliers = true;
  cmd_compare(ws, "exp", "exp", options);
  const json doc =
      read_json(ws / "exp" / "reports" / "compare_exp_vs_exp.json");
  CHECK(doc["metadata"]["match_anchor"] == "centroid");
  CHECK(doc["metadata"]["exclude_outliers"] == true);
  CHECK(doc["systems"]["rts"]["summary"]["median"] == 0.0);

  options.radius = -1.0;
  CHECK_THROWS_AS(cmd_compare(ws, "exp", "exp", options), ConfigError);
}

TEST_CASE("seed override changes the bundle") {
  TempDir dir("gtruth_ws_seed");
  const auto ws1 = dir.path / "w1";
  const auto ws2 = dir.path / "w2";
  write_spec(dir.path / "spec.json", "exp", 10.0, 5);
  cmd_synth(dir.path / "spec.json", ws1, std::nullopt);
  cmd_synth(dir.path / "spec.json", ws2, 777);
  std::ifstream a(ws1 / "exp" / "raw" / "rts_station0.csv");
  std::ifstream b(ws2 / "exp" / "raw" / "rts_station0.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() != sb.str());
}
