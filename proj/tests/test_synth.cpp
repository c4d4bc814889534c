#include "doctest.h"
#include "gtruth/synth.hpp"
#include "gtruth/sync.hpp"
#include "oracle_constants.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace gtruth;

namespace {
constexpr double kPi = std::numbers::pi;

PathSpec line_path(double duration = 10.0) {
  PathSpec p;
  p.kind = PathKind::line;
  p.duration = duration;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};
}  // namespace

TEST_CASE("a 10 s line at 2.5 Hz gives 26 poses marching along +x") {
  const std::vector<Pose> poses = generate_ground_truth(line_path());
  REQUIRE(poses.size() == 26);
  for (std::size_t j = 0; j < poses.size(); ++j) {
    const Point3 expected(0.4 * j, 0.0, 0.0);
    CHECK((poses[j].transform.translation - expected).norm() < 1e-12);
    CHECK((poses[j].transform.rotation - Eigen::Matrix3d::Identity()).norm() <
          1e-12);
  }
}

TEST_CASE("circle keeps the center distance at the radius") {
  PathSpec p;
  p.kind = PathKind::circle;
  p.radius = 17.0;
  p.duration = 120.0;
  p.start = Point3(5, -3, 0.5);
  for (const Pose& pose : generate_ground_truth(p)) {
    CHECK(std::abs((pose.transform.translation - p.start).norm() - 17.0) <
          1e-12);
    CHECK(is_orthonormal(pose.transform.rotation));
  }
}

TEST_CASE("single waypoint means a constant pose") {
  PathSpec p;
  p.kind = PathKind::waypoint_list;
  p.waypoints = {Point3(3, 4, 5)};
  p.duration = 4.0;
  const std::vector<Pose> poses = generate_ground_truth(p);
  REQUIRE(poses.size() == 11);
  for (const Pose& pose : poses) {
    CHECK(pose.transform.translation.isApprox(Point3(3, 4, 5), 1e-15));
    CHECK(pose.transform.rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  }
}

TEST_CASE("lawnmower stays on the serpentine and moves at speed") {
  PathSpec p;
  p.kind = PathKind::lawnmower;
  p.duration = 200.0;
  p.leg_length = 30.0;
  p.leg_spacing = 4.0;
  const std::vector<Pose> poses = generate_ground_truth(p);
  REQUIRE(poses.size() == 501);
  for (std::size_t j = 1; j < poses.size(); ++j) {
    const double ds = (poses[j].transform.translation -
                       poses[j - 1].transform.translation)
                          .norm();
    CHECK(ds <= p.speed * 0.4 + 1e-9);  // corners cut chords, never faster
  }
  CHECK(poses.back().transform.translation.y() > 0.0);  // advanced across legs
}

TEST_CASE("default phases stagger the three streams") {
  SynthSpec spec = SynthSpec::defaults();
  const auto phases = spec.resolved_phases();
  CHECK(phases[0] == 0.0);
  CHECK(phases[1] == doctest::Approx(1.0 / 7.5).epsilon(1e-15));
  CHECK(phases[2] == doctest::Approx(2.0 / 7.5).epsilon(1e-15));
  spec.phases = {0.0, 0.1};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("jittered timestamps stay strictly increasing") {
  const PathSpec p = line_path(200.0);
  Rng rng(5, "jitter");
  const std::vector<Timestamp> t = sample_times(p, 0.1, 0.2, rng);
  REQUIRE(t.size() > 100);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
}

TEST_CASE("noiseless rts observations invert to the prism world positions") {
  SynthSpec spec = SynthSpec::defaults();
  spec.path.kind = PathKind::circle;
  spec.path.radius = 25.0;
  spec.path.duration = 40.0;
  spec.noise = NoiseModel{};
  spec.noise.rts_sigma_xyz = 0.0;
  spec.noise.timestamp_jitter = 0.0;
  spec.noise.gnss_bias = 0.0;

  const BodyCalibration body = BodyCalibration::from_points(
      TargetKind::prism, spec.prism_body[0], spec.prism_body[1],
      spec.prism_body[2]);
  const auto phases = spec.resolved_phases();
  const auto obs =
      sample_rts_observations(spec.path, body, spec.noise, spec.stations,
                              phases);
  for (int k = 0; k < 3; ++k) {
    REQUIRE(!obs[k].empty());
    const RigidTransform to_world = spec.stations[k].to_world();
    for (std::size_t i = 0; i < obs[k].size(); i += 7) {
      const RtsObservation& o = obs[k][i];
      CHECK(o.station == spec.stations[k].name);
      CHECK(o.slant_distance > 0.0);
      CHECK(o.azimuth >= 0.0);
      CHECK(o.azimuth < 2.0 * kPi);
      const Point3 in_station = rts_to_cartesian(o).p;
      const Point3 world = apply(to_world, in_station);
      const Pose truth = path_pose(spec.path, o.t);
      const Point3 expected =
          truth.transform.rotation * spec.prism_body[k] +
          truth.transform.translation;
      CHECK((world - expected).norm() < 1e-9);
    }
  }
}

TEST_CASE("noiseless gnss fixes invert to the antenna world positions") {
  SynthSpec spec = SynthSpec::defaults();
  spec.path.duration = 40.0;
  spec.noise.gnss_sigma_horizontal = 0.0;
  spec.noise.gnss_sigma_vertical = 0.0;
  spec.noise.timestamp_jitter = 0.0;
  spec.noise.gnss_bias = 0.0;

  const BodyCalibration body = BodyCalibration::from_points(
      TargetKind::gnss_antenna, spec.gnss_body[0], spec.gnss_body[1],
      spec.gnss_body[2]);
  const auto fixes = sample_gnss_fixes(spec.path, body, spec.noise,
                                       spec.origin, spec.resolved_phases());
  for (int k = 0; k < 3; ++k) {
    REQUIRE(!fixes[k].empty());
    for (std::size_t i = 0; i < fixes[k].size(); i += 11) {
      const GnssFix& f = fixes[k][i];
      CHECK(f.fix_quality == FixQuality::rtk_fixed);
      const Point3 enu = geodetic_to_enu(f, spec.origin).p;
      const Pose truth = path_pose(spec.path, f.t);
      const Point3 expected = truth.transform.rotation * spec.gnss_body[k] +
                              truth.transform.translation;
      // the geodetic round trip floors near 2.4e-9 m (ECEF magnitude times
      // double epsilon); see tests/oracles/geo_expected.py
      CHECK((enu - expected).norm() < 2.0 * oracle::kInverseRoundTripWorst);
    }
  }
}

TEST_CASE("gnss bias is one constant vector per stream") {
  SynthSpec spec = SynthSpec::defaults();
  spec.path.duration = 20.0;
  spec.noise.gnss_sigma_horizontal = 0.0;
  spec.noise.gnss_sigma_vertical = 0.0;
  spec.noise.timestamp_jitter = 0.0;
  spec.noise.gnss_bias = 0.1;

  const BodyCalibration body = BodyCalibration::from_points(
      TargetKind::gnss_antenna, spec.gnss_body[0], spec.gnss_body[1],
      spec.gnss_body[2]);
  const auto tracks = sample_world_tracks(spec.path, body, spec.noise,
                                          spec.resolved_phases(), "gnss");
  for (int k = 0; k < 3; ++k) {
    REQUIRE(tracks[k].size() > 10);
    Point3 first_offset = Point3::Zero();
    for (std::size_t i = 0; i < tracks[k].size(); ++i) {
      const TimedPoint& s = tracks[k].samples[i];
      const Pose truth = path_pose(spec.path, s.t);
      const Point3 expected = truth.transform.rotation * spec.gnss_body[k] +
                              truth.transform.translation;
      const Point3 offset = s.p - expected;
      CHECK(std::abs(offset.norm() - 0.1) < 1e-9);
      if (i == 0)
        first_offset = offset;
      else
        CHECK((offset - first_offset).norm() < 1e-9);
    }
  }
}

TEST_CASE("write_bundle emits a parseable, deterministic bundle") {
  SynthSpec spec = SynthSpec::defaults();
  spec.id = "bundle";
  spec.path.duration = 12.0;

  TempDir dir_a("gtruth_synth_a");
  TempDir dir_b("gtruth_synth_b");
  write_bundle(spec, dir_a.path / spec.id);
  write_bundle(spec, dir_b.path / spec.id);

  for (const char* rel :
       {"raw/rts_station0.csv", "raw/rts_station1.csv", "raw/rts_station2.csv",
        "raw/gnss0.csv", "raw/gnss1.csv", "raw/gnss2.csv",
        "calib/gcp_station0.csv", "calib/gcp_station1.csv",
        "calib/gcp_station2.csv", "calib/prisms_body.csv",
        "calib/antennas_body.csv", "calib/origin.csv", "truth.csv"}) {
    CAPTURE(rel);
    REQUIRE(std::filesystem::exists(dir_a.path / spec.id / rel));
    CHECK(slurp(dir_a.path / spec.id / rel) ==
          slurp(dir_b.path / spec.id / rel));  // same seed, same bytes
  }

  {
    std::ifstream in(dir_a.path / spec.id / "raw/rts_station1.csv");
    const RtsLog log = parse_rts_log(in, "station1");
    CHECK(log.target == TargetId{TargetKind::prism, 1});
    CHECK(log.errors.skipped == 0);
    CHECK(log.observations.size() >= 29);  // ~12 s at 2.5 Hz, phase shifted
  }
  {
    std::ifstream in(dir_a.path / spec.id / "raw/gnss2.csv");
    const GnssLog log = parse_gnss_log(in);
    CHECK(log.target == TargetId{TargetKind::gnss_antenna, 2});
    CHECK(log.errors.skipped == 0);
  }
  {
    std::ifstream in(dir_a.path / spec.id / "calib/origin.csv");
    const GeodeticOrigin o = parse_origin(in);
    CHECK(o.ellipsoidal_height == 98.0);
  }
  {
    std::ifstream in(dir_a.path / spec.id / "calib/prisms_body.csv");
    CHECK(load_body_calibration(in).kind == TargetKind::prism);
  }

  // truth.csv: header plus one pose per sample tick
  const std::string truth = slurp(dir_a.path / spec.id / "truth.csv");
  CHECK(truth.rfind("t,x,y,z,qw,qx,qy,qz\n", 0) == 0);

  // a different seed changes the raw logs
  SynthSpec other = spec;
  other.noise.seed = 999;
  TempDir dir_c("gtruth_synth_c");
  write_bundle(other, dir_c.path / spec.id);
  CHECK(slurp(dir_a.path / spec.id / "raw/rts_station0.csv") !=
        slurp(dir_c.path / spec.id / "raw/rts_station0.csv"));
}

TEST_CASE("synth spec validation") {
  SynthSpec spec = SynthSpec::defaults();
  spec.id = "has/slash";
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.id = "";
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.id = "ok";
  spec.with_rts = false;
  spec.with_gnss = false;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.with_rts = true;
  spec.gcp_count = 2;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.gcp_count = 10;
  spec.stations[1].name = "station0";  // duplicate
  CHECK_THROWS_AS(spec.validate(), ConfigError);

  PathSpec p;
  p.rate = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.rate = 2.5;
  p.speed = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  NoiseModel n;
  n.rts_sigma_xyz = -0.1;
  CHECK_THROWS_AS(n.validate(), ConfigError);
}
