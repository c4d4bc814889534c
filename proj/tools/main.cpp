#include "gtruth/workspace.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

// Parses --reference values: "stream0" or "grid:<step>".
void apply_reference(const std::string& value, gtruth::SyncPolicy& policy) {
  if (value == "stream0") {
    policy.reference = gtruth::SyncReference::stream0_timestamps;
    return;
  }
  if (value.rfind("grid:", 0) == 0) {
    policy.reference = gtruth::SyncReference::union_grid;
    const std::string step = value.substr(5);
    try {
      std::size_t used = 0;
      policy.grid_step = std::stod(step, &used);
      if (used != step.size()) throw std::invalid_argument(step);
    } catch (const std::exception&) {
      throw gtruth::ConfigError("invalid grid step '" + step +
                                "' in --reference");
    }
    return;
  }
  throw gtruth::ConfigError("--reference must be 'stream0' or 'grid:<step>'");
}

gtruth::MatchAnchorKind parse_anchor(const std::string& value) {
  if (value == "target0") return gtruth::MatchAnchorKind::target0;
  if (value == "centroid") return gtruth::MatchAnchorKind::centroid;
  throw gtruth::ConfigError("--match-anchor must be 'target0' or 'centroid'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gtruth: ground-truth trajectory reconstruction and "
               "evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gtruth::kToolVersion));

  std::string workspace = ".";
  app.add_option("-w,--workspace", workspace,
                 "workspace directory (default: current directory)");

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic experiment bundle from a JSON spec");
  std::string spec_file;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_value = 0;
  synth->add_option("spec", spec_file, "synthetic scenario spec (JSON)")
      ->required();
  auto* seed_opt =
      synth->add_option("--seed", seed_value, "override the RNG seed");

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "estimate station transforms from shared GCPs");
  std::string calibrate_id;
  calibrate->add_option("experiment", calibrate_id, "experiment id")
      ->required();

  // reconstruct
  auto* reconstruct = app.add_subcommand(
      "reconstruct", "synchronize streams and reconstruct 6-DOF poses");
  std::string reconstruct_id;
  std::string reconstruct_system;
  std::string reference = "stream0";
  gtruth::PipelineOptions options;
  reconstruct->add_option("experiment", reconstruct_id, "experiment id")
      ->required();
  reconstruct
      ->add_option("system", reconstruct_system, "positioning system (rts|gnss)")
      ->required();
  reconstruct->add_option("--max-gap", options.sync.max_gap,
                          "max bracketing gap for interpolation [s]");
  reconstruct->add_option("--reference", reference,
                          "reference timeline: stream0 | grid:<step>");
  reconstruct->add_flag("--admit-float", options.admit_float,
                        "admit RTK float GNSS fixes (default: fixed only)");
  reconstruct->add_option("--max-speed", options.max_speed,
                          "implied-speed gate [m/s]");
  reconstruct->add_option("--reject-threshold", options.reject_threshold,
                          "pose residual RMSE outlier threshold [m]");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "compute inter-target distance error metrics");
  std::string evaluate_id;
  evaluate->add_option("experiment", evaluate_id, "experiment id")->required();
  evaluate->add_flag("--exclude-outliers", options.exclude_outliers,
                     "drop triplets whose pose residual exceeds the "
                     "rejection threshold");
  evaluate->add_option("--reject-threshold", options.reject_threshold,
                       "pose residual RMSE outlier threshold [m]");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "compare two experiments via nearest-neighbour matching");
  std::string compare_a;
  std::string compare_b;
  std::string anchor = "target0";
  compare->add_option("experiment_a", compare_a, "first experiment id")
      ->required();
  compare->add_option("experiment_b", compare_b, "second experiment id")
      ->required();
  compare->add_option("--radius", options.radius,
                      "nearest-neighbour match radius [m]");
  compare->add_option("--match-anchor", anchor,
                      "match anchor: target0 | centroid");
  compare->add_flag("--exclude-outliers", options.exclude_outliers,
                    "drop triplets whose pose residual exceeds the rejection "
                    "threshold");
  compare->add_option("--reject-threshold", options.reject_threshold,
                      "pose residual RMSE outlier threshold [m]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? gtruth::kExitOk : gtruth::kExitConfig;
  }

  try {
    if (*synth) {
      if (*seed_opt) seed_override = seed_value;
      gtruth::cmd_synth(spec_file, workspace, seed_override);
    } else if (*calibrate) {
      gtruth::cmd_calibrate(workspace, calibrate_id);
    } else if (*reconstruct) {
      apply_reference(reference, options.sync);
      gtruth::cmd_reconstruct(workspace, reconstruct_id,
                              gtruth::system_from_string(reconstruct_system),
                              options);
    } else if (*evaluate) {
      gtruth::cmd_evaluate(workspace, evaluate_id, options);
    } else if (*compare) {
      options.match_anchor = parse_anchor(anchor);
      gtruth::cmd_compare(workspace, compare_a, compare_b, options);
    }
  } catch (const gtruth::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gtruth::kExitConfig;
  } catch (const gtruth::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gtruth::kExitData;
  } catch (const gtruth::DegeneracyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gtruth::kExitDegeneracy;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gtruth::kExitConfig;
  }
  return gtruth::kExitOk;
}
