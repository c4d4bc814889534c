#include "gtruth/synth.hpp"

#include "gtruth/csvio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace gtruth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;

// Piecewise-linear path evaluator shared by lawnmower and waypoint paths.
class Polyline {
 public:
  explicit Polyline(const std::vector<Point3>& points) : points_(points) {
    cumulative_.push_back(0.0);
    double heading = 0.0;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      const Point3 d = points_[i + 1] - points_[i];
      cumulative_.push_back(cumulative_.back() + d.norm());
      if (std::hypot(d.x(), d.y()) > 1e-12) heading = std::atan2(d.y(), d.x());
      headings_.push_back(heading);  // vertical segments keep the last heading
    }
  }

  double total_length() const { return cumulative_.back(); }

  Pose at(double arc, const FrameId& frame) const {
    Pose pose;
    pose.transform.from = kBodyFrame;
    pose.transform.to = frame;
    if (points_.size() == 1) {
      pose.transform.translation = points_.front();
      return pose;
    }
    const double s = std::clamp(arc, 0.0, total_length());
    // First segment whose end lies beyond s (last segment for s == total).
    std::size_t seg = std::upper_bound(cumulative_.begin() + 1,
                                       cumulative_.end(), s) -
                      (cumulative_.begin() + 1);
    seg = std::min(seg, points_.size() - 2);
    const double len = cumulative_[seg + 1] - cumulative_[seg];
    const double u = len > 0.0 ? (s - cumulative_[seg]) / len : 0.0;
    pose.transform.translation =
        points_[seg] + u * (points_[seg + 1] - points_[seg]);
    pose.transform.rotation = rotation_z(headings_[seg]);
    return pose;
  }

 private:
  std::vector<Point3> points_;
  std::vector<double> cumulative_;
  std::vector<double> headings_;
};

std::vector<Point3> lawnmower_waypoints(const PathSpec& path) {
  // Serpentine legs along +x, advancing +y; enough length for the duration.
  const double needed = path.speed * path.duration;
  const double cycle = path.leg_length + path.leg_spacing;
  const std::size_t legs = static_cast<std::size_t>(needed / cycle) + 2;
  if (legs > 1000000)
    throw ConfigError("lawnmower path would need an unreasonable leg count");
  std::vector<Point3> wps;
  wps.reserve(2 * legs);
  for (std::size_t i = 0; i < legs; ++i) {
    const double y = static_cast<double>(i) * path.leg_spacing;
    const Point3 near = path.start + Point3(0.0, y, 0.0);
    const Point3 far = path.start + Point3(path.leg_length, y, 0.0);
    if (i % 2 == 0) {
      wps.push_back(near);
      wps.push_back(far);
    } else {
      wps.push_back(far);
      wps.push_back(near);
    }
  }
  return wps;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_point_noise(Rng& rng, double sx, double sy, double sz, Point3& p) {
  p.x() += sx * rng.normal();
  p.y() += sy * rng.normal();
  p.z() += sz * rng.normal();
}

struct RtsAngles {
  double azimuth, elevation, distance;
};

// Inverse of rts_to_cartesian.
RtsAngles polar_from_cartesian(const Point3& p) {
  RtsAngles a;
  a.distance = p.norm();
  if (!(a.distance > 1e-9))
    throw DegeneracyError("target coincides with the station origin");
  a.azimuth = std::atan2(p.x(), p.y());
  if (a.azimuth < 0.0) a.azimuth += 2.0 * kPi;
  if (a.azimuth >= 2.0 * kPi) a.azimuth = 0.0;
  a.elevation = std::asin(std::clamp(p.z() / a.distance, -1.0, 1.0));
  return a;
}

}  // namespace

void PathSpec::validate() const {
  if (!(speed > 0.0) || !(duration > 0.0) || !(rate > 0.0))
    throw ConfigError("PathSpec speed, duration and rate must be > 0");
  if (!start.allFinite()) throw ConfigError("PathSpec start must be finite");
  switch (kind) {
    case PathKind::line:
      break;
    case PathKind::circle:
      if (!(radius > 0.0)) throw ConfigError("circle radius must be > 0");
      break;
    case PathKind::lawnmower:
      if (!(leg_length > 0.0) || !(leg_spacing > 0.0))
        throw ConfigError("lawnmower leg_length and leg_spacing must be > 0");
      break;
    case PathKind::waypoint_list:
      if (waypoints.empty())
        throw ConfigError("waypoint_list path needs at least one waypoint");
      for (const Point3& w : waypoints)
        if (!w.allFinite()) throw ConfigError("waypoints must be finite");
      break;
  }
}

Pose path_pose(const PathSpec& path, double t, const FrameId& frame) {
  path.validate();
  Pose pose;
  pose.t = t;
  pose.transform.from = kBodyFrame;
  pose.transform.to = frame;
  switch (path.kind) {
    case PathKind::line: {
      const Point3 dir(std::cos(path.heading), std::sin(path.heading), 0.0);
      pose.transform.translation = path.start + path.speed * t * dir;
      pose.transform.rotation = rotation_z(path.heading);
      return pose;
    }
    case PathKind::circle: {
      const double theta = path.speed / path.radius * t;
      pose.transform.translation =
          path.start +
          path.radius * Point3(std::cos(theta), std::sin(theta), 0.0);
      pose.transform.rotation = rotation_z(theta + kPi / 2.0);
      return pose;
    }
    case PathKind::lawnmower: {
      Pose p = Polyline(lawnmower_waypoints(path)).at(path.speed * t, frame);
      p.t = t;
      return p;
    }
    case PathKind::waypoint_list: {
      Pose p = Polyline(path.waypoints).at(path.speed * t, frame);
      p.t = t;
      return p;
    }
  }
  throw ConfigError("invalid path kind");
}

std::vector<Pose> generate_ground_truth(const PathSpec& path,
                                        const FrameId& frame) {
  path.validate();
  const std::size_t count =
      static_cast<std::size_t>(path.duration * path.rate) + 1;
  std::vector<Pose> poses;
  poses.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
    poses.push_back(path_pose(path, static_cast<double>(j) * path.step(), frame));
  return poses;
}

RigidTransform StationSpec::to_world() const {
  RigidTransform T;
  T.rotation = rotation_z(yaw);
  T.translation = position;
  T.from = name;
  T.to = "world";
  return T;
}

void NoiseModel::validate() const {
  const double values[] = {rts_sigma_xyz, gnss_sigma_horizontal,
                           gnss_sigma_vertical, timestamp_jitter, gnss_bias,
                           gcp_sigma};
  for (const double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("NoiseModel sigmas/bias must be finite and >= 0");
}

std::vector<Timestamp> sample_times(const PathSpec& path, double phase,
                                    double jitter_sigma, Rng& rng) {
  const double step = path.step();
  const double clamp_at = 0.49 * step;  // keeps timestamps strictly increasing
  std::vector<Timestamp> times;
  times.reserve(static_cast<std::size_t>(path.duration / step) + 2);
  for (std::size_t j = 0;; ++j) {
    const double base = phase + static_cast<double>(j) * step;
    if (base > path.duration) break;
    double t = base;
    if (jitter_sigma > 0.0)
      t += std::clamp(rng.normal(0.0, jitter_sigma), -clamp_at, clamp_at);
    times.push_back(t);
  }
  return times;
}

std::array<TargetTrajectory, 3> sample_world_tracks(
    const PathSpec& path, const BodyCalibration& calib,
    const NoiseModel& noise, const std::array<double, 3>& phases,
    std::string_view rng_namespace, const FrameId& frame) {
  path.validate();
  noise.validate();

  std::array<TargetTrajectory, 3> tracks;
  for (int k = 0; k < 3; ++k) {
    Rng rng(noise.seed,
            std::string(rng_namespace) + "/" + std::to_string(k));

    // Draw order per stream is pinned (bias, jitter, then per-sample noise)
    // so outputs are reproducible for a given seed.
    Point3 bias = Point3::Zero();
    if (calib.kind == TargetKind::gnss_antenna && noise.gnss_bias > 0.0) {
      Point3 dir;
      do {
        dir = Point3(rng.normal(), rng.normal(), rng.normal());
      } while (dir.norm() < 1e-12);
      bias = noise.gnss_bias * dir.normalized();
    }

    const std::vector<Timestamp> times =
        sample_times(path, phases[k], noise.timestamp_jitter, rng);

    std::vector<TimedPoint> points;
    points.reserve(times.size());
    for (const Timestamp t : times) {
      const Pose pose = path_pose(path, t, frame);
      TimedPoint pt;
      pt.t = t;
      pt.p = apply(pose.transform, calib.points[k]) + bias;
      pt.frame = frame;
      if (calib.kind == TargetKind::prism)
        write_point_noise(rng, noise.rts_sigma_xyz, noise.rts_sigma_xyz,
                          noise.rts_sigma_xyz, pt.p);
      else
        write_point_noise(rng, noise.gnss_sigma_horizontal,
                          noise.gnss_sigma_horizontal,
                          noise.gnss_sigma_vertical, pt.p);
      points.push_back(pt);
    }
    tracks[k] = make_trajectory(TargetId{calib.kind, k}, frame, points);
  }
  return tracks;
}

std::array<std::vector<RtsObservation>, 3> sample_rts_observations(
    const PathSpec& path, const BodyCalibration& calib,
    const NoiseModel& noise, const std::array<StationSpec, 3>& stations,
    const std::array<double, 3>& phases) {
  if (calib.kind != TargetKind::prism)
    throw ConfigError("RTS sampling needs a prism body calibration");
  const std::array<TargetTrajectory, 3> tracks =
      sample_world_tracks(path, calib, noise, phases, "rts");

  std::array<std::vector<RtsObservation>, 3> streams;
  for (int k = 0; k < 3; ++k) {
    const RigidTransform world_to_station = inverse(stations[k].to_world());
    streams[k].reserve(tracks[k].samples.size());
    for (const TimedPoint& pt : tracks[k].samples) {
      const RtsAngles a = polar_from_cartesian(apply(world_to_station, pt.p));
      RtsObservation obs;
      obs.t = pt.t;
      obs.azimuth = a.azimuth;
      obs.elevation = a.elevation;
      obs.slant_distance = a.distance;
      obs.station = stations[k].name;
      obs.target = TargetId{TargetKind::prism, k};
      streams[k].push_back(obs);
    }
  }
  return streams;
}

std::array<std::vector<GnssFix>, 3> sample_gnss_fixes(
    const PathSpec& path, const BodyCalibration& calib,
    const NoiseModel& noise, const GeodeticOrigin& origin,
    const std::array<double, 3>& phases) {
  if (calib.kind != TargetKind::gnss_antenna)
    throw ConfigError("GNSS sampling needs an antenna body calibration");
  const std::array<TargetTrajectory, 3> tracks =
      sample_world_tracks(path, calib, noise, phases, "gnss");

  std::array<std::vector<GnssFix>, 3> streams;
  for (int k = 0; k < 3; ++k) {
    streams[k].reserve(tracks[k].samples.size());
    for (const TimedPoint& pt : tracks[k].samples) {
      const Eigen::Vector3d g = enu_to_geodetic(pt.p, origin);
      GnssFix fix;
      fix.t = pt.t;
      fix.latitude = g.x();
      fix.longitude = g.y();
      fix.ellipsoidal_height = g.z();
      fix.fix_quality = FixQuality::rtk_fixed;
      fix.target = TargetId{TargetKind::gnss_antenna, k};
      streams[k].push_back(fix);
    }
  }
  return streams;
}

SynthSpec SynthSpec::defaults() { return SynthSpec{}; }

std::array<double, 3> SynthSpec::resolved_phases() const {
  if (phases.empty()) {
    const double slot = 1.0 / (3.0 * path.rate);
    return {0.0, slot, 2.0 * slot};
  }
  if (phases.size() != 3)
    throw ConfigError("phases must list exactly 3 offsets (or be omitted)");
  return {phases[0], phases[1], phases[2]};
}

void SynthSpec::validate() const {
  if (id.empty() || id.find('/') != std::string::npos ||
      id.find("..") != std::string::npos)
    throw ConfigError("experiment id must be a plain directory name");
  if (!with_rts && !with_gnss)
    throw ConfigError("bundle must enable at least one system");
  path.validate();
  noise.validate();
  for (const double p : phases)
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ConfigError("phases must be finite and >= 0");
  resolved_phases();
  if (gcp_count < 3) throw ConfigError("gcp_count must be >= 3");
  if (!(gcp_radius > 0.0)) throw ConfigError("gcp_radius must be > 0");
  for (int i = 0; i < 3; ++i) {
    if (stations[i].name.empty())
      throw ConfigError("station names must be non-empty");
    for (int j = i + 1; j < 3; ++j)
      if (stations[i].name == stations[j].name)
        throw ConfigError("station names must be unique");
  }
  if (!(std::abs(origin.latitude) <= kPi / 2.0))
    throw ConfigError("origin latitude out of bounds");
}

namespace {

void write_rts_log(const std::filesystem::path& path, const FrameId& station,
                   int k, const std::vector<RtsObservation>& obs) {
  std::ofstream out = open_out(path);
  out << "# station=" << station << '\n';
  out << "# target=prism" << k << '\n';
  out << "# angle_unit=rad\n";
  out << "t,azimuth,elevation,slant_distance\n";
  for (const RtsObservation& o : obs)
    out << csv::format_double(o.t) << ',' << csv::format_double(o.azimuth)
        << ',' << csv::format_double(o.elevation) << ','
        << csv::format_double(o.slant_distance) << '\n';
}

void write_gnss_log(const std::filesystem::path& path, int k,
                    const std::vector<GnssFix>& fixes) {
  std::ofstream out = open_out(path);
  out << "# target=gnss" << k << '\n';
  out << "t,lat,lon,height,quality\n";
  for (const GnssFix& f : fixes)
    out << csv::format_double(f.t) << ','
        << csv::format_double(f.latitude * kRadToDeg) << ','
        << csv::format_double(f.longitude * kRadToDeg) << ','
        << csv::format_double(f.ellipsoidal_height) << ','
        << to_string(f.fix_quality) << '\n';
}

}  // namespace

void write_bundle(const SynthSpec& spec,
                  const std::filesystem::path& experiment_dir) {
  spec.validate();
  std::filesystem::create_directories(experiment_dir / "raw");
  std::filesystem::create_directories(experiment_dir / "calib");
  const std::array<double, 3> phases = spec.resolved_phases();

  if (spec.with_rts) {
    const BodyCalibration body = BodyCalibration::from_points(
        TargetKind::prism, spec.prism_body[0], spec.prism_body[1],
        spec.prism_body[2]);
    {
      std::ofstream out = open_out(experiment_dir / kPrismBodyFile);
      write_body_calibration(out, body);
    }

    const auto streams = sample_rts_observations(spec.path, body, spec.noise,
                                                 spec.stations, phases);
    for (int k = 0; k < 3; ++k)
      write_rts_log(experiment_dir / rts_log_name(k), spec.stations[k].name, k,
                    streams[k]);

    // Static ground control points on a circle around the stations, with a
    // mild height profile so the sets are never planar-degenerate.
    Point3 center = Point3::Zero();
    for (const StationSpec& st : spec.stations) center += st.position;
    center /= 3.0;
    std::vector<Point3> gcp_world;
    gcp_world.reserve(spec.gcp_count);
    for (int j = 0; j < spec.gcp_count; ++j) {
      const double ang = 2.0 * kPi * static_cast<double>(j) /
                         static_cast<double>(spec.gcp_count);
      gcp_world.push_back(center + Point3(spec.gcp_radius * std::cos(ang),
                                          spec.gcp_radius * std::sin(ang),
                                          0.1 * std::sin(3.0 * ang)));
    }
    for (int k = 0; k < 3; ++k) {
      Rng rng(spec.noise.seed, "gcp/" + std::to_string(k));
      const RigidTransform world_to_station =
          inverse(spec.stations[k].to_world());
      std::ofstream out = open_out(experiment_dir / gcp_file_name(k));
      out << "# station=" << spec.stations[k].name << '\n';
      out << "gcp_id,x,y,z\n";
      for (int j = 0; j < spec.gcp_count; ++j) {
        Point3 p = apply(world_to_station, gcp_world[j]);
        if (spec.noise.gcp_sigma > 0.0)
          write_point_noise(rng, spec.noise.gcp_sigma, spec.noise.gcp_sigma,
                            spec.noise.gcp_sigma, p);
        out << j << ',' << csv::format_double(p.x()) << ','
            << csv::format_double(p.y()) << ',' << csv::format_double(p.z())
            << '\n';
      }
    }
  }

  if (spec.with_gnss) {
    const BodyCalibration body = BodyCalibration::from_points(
        TargetKind::gnss_antenna, spec.gnss_body[0], spec.gnss_body[1],
        spec.gnss_body[2]);
    {
      std::ofstream out = open_out(experiment_dir / kGnssBodyFile);
      write_body_calibration(out, body);
    }

    // Quantize the origin through its file representation (decimal degrees)
    // so sampling and later ingest work from identical values.
    GeodeticOrigin origin = spec.origin;
    origin.latitude = (origin.latitude * kRadToDeg) * kDegToRad;
    origin.longitude = (origin.longitude * kRadToDeg) * kDegToRad;
    {
      std::ofstream out = open_out(experiment_dir / kOriginFile);
      out << "lat,lon,height\n";
      out << csv::format_double(origin.latitude * kRadToDeg) << ','
          << csv::format_double(origin.longitude * kRadToDeg) << ','
          << csv::format_double(origin.ellipsoidal_height) << '\n';
    }

    const auto streams =
        sample_gnss_fixes(spec.path, body, spec.noise, origin, phases);
    for (int k = 0; k < 3; ++k)
      write_gnss_log(experiment_dir / gnss_log_name(k), k, streams[k]);
  }

  {
    std::ofstream out = open_out(experiment_dir / kTruthFile);
    out << "t,x,y,z,qw,qx,qy,qz\n";
    for (const Pose& pose : generate_ground_truth(spec.path)) {
      const Eigen::Quaterniond q = to_quaternion(pose.transform.rotation);
      out << csv::format_double(pose.t) << ','
          << csv::format_double(pose.transform.translation.x()) << ','
          << csv::format_double(pose.transform.translation.y()) << ','
          << csv::format_double(pose.transform.translation.z()) << ','
          << csv::format_double(q.w()) << ',' << csv::format_double(q.x())
          << ',' << csv::format_double(q.y()) << ','
          << csv::format_double(q.z()) << '\n';
    }
  }
}

}  // namespace gtruth
