#pragma once

#include "gtruth/core.hpp"
#include "gtruth/metrics.hpp"
#include "gtruth/pose.hpp"
#include "gtruth/sync.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace gtruth {

inline constexpr std::string_view kToolVersion = "0.1.0";

// CLI exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;      // input/configuration error
inline constexpr int kExitData = 3;        // data insufficiency
inline constexpr int kExitDegeneracy = 4;  // numerical degeneracy

enum class SystemKind { rts, gnss };
std::string to_string(SystemKind system);
SystemKind system_from_string(const std::string& name);

enum class MatchAnchorKind { target0, centroid };

// Every tunable of the pipeline; embedded verbatim in reports.
struct PipelineOptions {
  SyncPolicy sync;
  bool admit_float = false;  // also admit rtk_float GNSS fixes
  double max_speed = 5.0;    // m/s speed gate
  double reject_threshold = kDefaultRejectThreshold;
  bool exclude_outliers = false;
  double radius = kDefaultMatchRadius;  // NN match radius, m
  MatchAnchorKind match_anchor = MatchAnchorKind::target0;
};

// Per-system file wiring of one experiment; paths relative to the
// experiment directory <workspace>/<id>/.
struct SystemConfig {
  std::vector<std::string> logs;      // 3 raw logs, stream order 0..2
  std::vector<std::string> gcp;       // rts: 3 GCP files, station order
  std::vector<std::string> stations;  // rts: station frame ids, stream order
  std::string body;                   // body calibration CSV
  std::string origin;                 // gnss: geodetic origin CSV
};

struct ExperimentConfig {
  std::string id;
  std::optional<SystemConfig> rts;
  std::optional<SystemConfig> gnss;

  const SystemConfig& require(SystemKind system) const;
};

struct WorkspaceConfig {
  int schema_version = 1;
  std::vector<ExperimentConfig> experiments;  // kept sorted by id

  static WorkspaceConfig load(const std::filesystem::path& workspace);
  void save(const std::filesystem::path& workspace) const;
  const ExperimentConfig& require(const std::string& id) const;
  void upsert(ExperimentConfig experiment);
};

// Command bodies behind the CLI; throw ConfigError/DataError/DegeneracyError
// (mapped to exit codes by the executable).
void cmd_synth(const std::filesystem::path& spec_file,
               const std::filesystem::path& workspace,
               std::optional<std::uint64_t> seed_override);
void cmd_calibrate(const std::filesystem::path& workspace,
                   const std::string& id);
void cmd_reconstruct(const std::filesystem::path& workspace,
                     const std::string& id, SystemKind system,
                     const PipelineOptions& options);
void cmd_evaluate(const std::filesystem::path& workspace, const std::string& id,
                  const PipelineOptions& options);
void cmd_compare(const std::filesystem::path& workspace,
                 const std::string& id_a, const std::string& id_b,
                 const PipelineOptions& options);

}  // namespace gtruth
