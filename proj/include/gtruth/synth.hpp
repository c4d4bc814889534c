#pragma once

#include "gtruth/core.hpp"
#include "gtruth/ingest.hpp"
#include "gtruth/pose.hpp"
#include "gtruth/rng.hpp"

#include <array>
#include <filesystem>
#include <numbers>

namespace gtruth {

enum class PathKind { line, circle, lawnmower, waypoint_list };

struct PathSpec {
  PathKind kind = PathKind::line;
  double speed = 1.0;      // m/s
  double duration = 60.0;  // s
  double rate = 2.5;       // Hz, nominal sampling rate per stream
  Point3 start = Point3::Zero();  // line start point; circle CENTER
  double heading = 0.0;    // line direction, radians CCW from +x
  double radius = 20.0;    // circle
  double leg_length = 40.0;   // lawnmower
  double leg_spacing = 5.0;   // lawnmower
  std::vector<Point3> waypoints;  // waypoint_list (>= 1 point)

  double step() const { return 1.0 / rate; }
  void validate() const;
};

// Continuous ground-truth pose at time t: position on the path, body x-axis
// along the direction of travel (heading tangent to the path).
Pose path_pose(const PathSpec& path, double t, const FrameId& frame = "world");

// Poses at t = j/rate for j = 0..floor(duration*rate).
std::vector<Pose> generate_ground_truth(const PathSpec& path,
                                        const FrameId& frame = "world");

struct StationSpec {
  FrameId name;
  Point3 position = Point3::Zero();  // in the common/world frame
  double yaw = 0.0;  // leveled instrument: rotation about +z only

  RigidTransform to_world() const;  // station frame -> world
};

struct NoiseModel {
  double rts_sigma_xyz = 0.003;         // m, isotropic per prism position
  double gnss_sigma_horizontal = 0.010;  // m, east/north per antenna
  double gnss_sigma_vertical = 0.020;    // m, up per antenna
  double timestamp_jitter = 0.02;        // s, clamped to +-0.49/rate
  double gnss_bias = 0.0;  // m, constant per-antenna offset magnitude per run
  double gcp_sigma = 0.0;  // m, isotropic per GCP measurement
  std::uint64_t seed = 1;

  void validate() const;
};

// Stream k of a system samples at phases[k] + j/rate + jitter; the jitter
// clamp keeps timestamps strictly increasing.
std::vector<Timestamp> sample_times(const PathSpec& path, double phase,
                                    double jitter_sigma, Rng& rng);

// Noisy target tracks in the world frame, before any polar/geodetic
// conversion. rng_namespace ("rts" or "gnss") scopes the per-stream
// generators, so these tracks match what the file writers emit. Noise is
// picked by calib.kind: isotropic rts_sigma for prisms, horizontal/vertical
// sigmas plus the constant bias vector for antennas.
std::array<TargetTrajectory, 3> sample_world_tracks(
    const PathSpec& path, const BodyCalibration& calib,
    const NoiseModel& noise, const std::array<double, 3>& phases,
    std::string_view rng_namespace, const FrameId& frame = "world");

// Per-station polar observation streams (station k tracks prism k); inverse
// of rts_to_cartesian applied to the noisy world tracks.
std::array<std::vector<RtsObservation>, 3> sample_rts_observations(
    const PathSpec& path, const BodyCalibration& calib,
    const NoiseModel& noise, const std::array<StationSpec, 3>& stations,
    const std::array<double, 3>& phases);

// Geodetic fix streams; inverse of geodetic_to_enu applied to the noisy
// world tracks (the world frame is the ENU frame at `origin`).
std::array<std::vector<GnssFix>, 3> sample_gnss_fixes(
    const PathSpec& path, const BodyCalibration& calib,
    const NoiseModel& noise, const GeodeticOrigin& origin,
    const std::array<double, 3>& phases);

struct SynthSpec {
  std::string id = "synthetic";
  bool with_rts = true;
  bool with_gnss = true;
  PathSpec path;
  NoiseModel noise;
  std::vector<double> phases;  // empty -> default k/(3*rate) per stream k
  // Default geometry: three targets at different heights on a small UGV,
  // antennas mounted 15 cm above the prisms.
  std::array<Point3, 3> prism_body{Point3(0.5, 0.0, 0.45),
                                   Point3(-0.25, 0.35, 1.0),
                                   Point3(-0.25, -0.35, 1.55)};
  std::array<Point3, 3> gnss_body{Point3(0.5, 0.0, 0.6),
                                  Point3(-0.25, 0.35, 1.15),
                                  Point3(-0.25, -0.35, 1.7)};
  std::array<StationSpec, 3> stations{
      StationSpec{"station0", Point3(0.0, 0.0, 0.0), 0.0},
      StationSpec{"station1", Point3(30.0, 10.0, 0.2), 2.1},
      StationSpec{"station2", Point3(-25.0, 20.0, -0.1), 4.0}};
  GeodeticOrigin origin{46.78 * std::numbers::pi / 180.0,
                        -71.28 * std::numbers::pi / 180.0, 98.0};
  int gcp_count = 10;
  double gcp_radius = 20.0;

  static SynthSpec defaults();
  std::array<double, 3> resolved_phases() const;
  void validate() const;
};

// Bundle file layout, shared with the CLI workspace code.
inline std::string rts_log_name(int k) {
  return "raw/rts_station" + std::to_string(k) + ".csv";
}
inline std::string gnss_log_name(int k) {
  return "raw/gnss" + std::to_string(k) + ".csv";
}
inline std::string gcp_file_name(int k) {
  return "calib/gcp_station" + std::to_string(k) + ".csv";
}
inline constexpr std::string_view kPrismBodyFile = "calib/prisms_body.csv";
inline constexpr std::string_view kGnssBodyFile = "calib/antennas_body.csv";
inline constexpr std::string_view kOriginFile = "calib/origin.csv";
inline constexpr std::string_view kTruthFile = "truth.csv";

// Writes a full experiment bundle: raw logs in the ingest schemas, GCP and
// body calibration files, origin, and the truth.csv golden file.
void write_bundle(const SynthSpec& spec,
                  const std::filesystem::path& experiment_dir);

}  // namespace gtruth
