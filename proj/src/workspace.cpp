#include "gtruth/workspace.hpp"

#include "gtruth/align.hpp"
#include "gtruth/csvio.hpp"
#include "gtruth/ingest.hpp"
#include "gtruth/synth.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numbers>

namespace gtruth {

using nlohmann::json;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

// --- config (de)serialization ---------------------------------------------

json system_to_json(const SystemConfig& sys) {
  json j;
  j["logs"] = sys.logs;
  j["body"] = sys.body;
  if (!sys.gcp.empty()) j["gcp"] = sys.gcp;
  if (!sys.stations.empty()) j["stations"] = sys.stations;
  if (!sys.origin.empty()) j["origin"] = sys.origin;
  return j;
}

SystemConfig system_from_json(const json& j, const std::string& where) {
  SystemConfig sys;
  try {
    sys.logs = j.at("logs").get<std::vector<std::string>>();
    sys.body = j.at("body").get<std::string>();
    if (j.contains("gcp")) sys.gcp = j["gcp"].get<std::vector<std::string>>();
    if (j.contains("stations"))
      sys.stations = j["stations"].get<std::vector<std::string>>();
    if (j.contains("origin")) sys.origin = j["origin"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (sys.logs.size() != 3)
    throw ConfigError(where + ": expected 3 log paths, got " +
                      std::to_string(sys.logs.size()));
  return sys;
}

// --- synth spec parsing ----------------------------------------------------

Point3 point_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(where + ": expected [x, y, z]");
  return Point3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

PathKind path_kind_from_string(const std::string& kind) {
  if (kind == "line") return PathKind::line;
  if (kind == "circle") return PathKind::circle;
  if (kind == "lawnmower") return PathKind::lawnmower;
  if (kind == "waypoint_list") return PathKind::waypoint_list;
  throw ConfigError("unknown path kind '" + kind + "'");
}

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec spec = SynthSpec::defaults();
  try {
    spec.id = j.at("id").get<std::string>();
    if (j.contains("systems")) {
      spec.with_rts = false;
      spec.with_gnss = false;
      for (const auto& s : j["systems"]) {
        const std::string name = s.get<std::string>();
        if (name == "rts")
          spec.with_rts = true;
        else if (name == "gnss")
          spec.with_gnss = true;
        else
          throw ConfigError("unknown system '" + name + "' in synth spec");
      }
    }
    if (j.contains("path")) {
      const json& p = j["path"];
      if (p.contains("kind"))
        spec.path.kind = path_kind_from_string(p["kind"].get<std::string>());
      if (p.contains("speed")) spec.path.speed = p["speed"].get<double>();
      if (p.contains("duration"))
        spec.path.duration = p["duration"].get<double>();
      if (p.contains("rate")) spec.path.rate = p["rate"].get<double>();
      if (p.contains("start"))
        spec.path.start = point_from_json(p["start"], "path.start");
      if (p.contains("heading")) spec.path.heading = p["heading"].get<double>();
      if (p.contains("radius")) spec.path.radius = p["radius"].get<double>();
      if (p.contains("leg_length"))
        spec.path.leg_length = p["leg_length"].get<double>();
      if (p.contains("leg_spacing"))
        spec.path.leg_spacing = p["leg_spacing"].get<double>();
      if (p.contains("waypoints")) {
        spec.path.waypoints.clear();
        for (const auto& w : p["waypoints"])
          spec.path.waypoints.push_back(point_from_json(w, "path.waypoints"));
      }
    }
    if (j.contains("noise")) {
      const json& n = j["noise"];
      if (n.contains("rts_sigma_xyz"))
        spec.noise.rts_sigma_xyz = n["rts_sigma_xyz"].get<double>();
      if (n.contains("gnss_sigma_horizontal"))
        spec.noise.gnss_sigma_horizontal =
            n["gnss_sigma_horizontal"].get<double>();
      if (n.contains("gnss_sigma_vertical"))
        spec.noise.gnss_sigma_vertical = n["gnss_sigma_vertical"].get<double>();
      if (n.contains("timestamp_jitter"))
        spec.noise.timestamp_jitter = n["timestamp_jitter"].get<double>();
      if (n.contains("gnss_bias"))
        spec.noise.gnss_bias = n["gnss_bias"].get<double>();
      if (n.contains("gcp_sigma"))
        spec.noise.gcp_sigma = n["gcp_sigma"].get<double>();
      if (n.contains("seed"))
        spec.noise.seed = n["seed"].get<std::uint64_t>();
    }
    if (j.contains("phases"))
      spec.phases = j["phases"].get<std::vector<double>>();
    if (j.contains("prism_body"))
      for (int k = 0; k < 3; ++k)
        spec.prism_body[k] =
            point_from_json(j["prism_body"].at(k), "prism_body");
    if (j.contains("gnss_body"))
      for (int k = 0; k < 3; ++k)
        spec.gnss_body[k] = point_from_json(j["gnss_body"].at(k), "gnss_body");
    if (j.contains("stations")) {
      const json& st = j["stations"];
      if (!st.is_array() || st.size() != 3)
        throw ConfigError("stations must list exactly 3 entries");
      for (int k = 0; k < 3; ++k) {
        spec.stations[k].name = st[k].at("name").get<std::string>();
        if (st[k].contains("position"))
          spec.stations[k].position =
              point_from_json(st[k]["position"], "stations.position");
        if (st[k].contains("yaw"))
          spec.stations[k].yaw = st[k]["yaw"].get<double>();
      }
    }
    if (j.contains("origin")) {
      const json& o = j["origin"];
      spec.origin.latitude = o.at("lat_deg").get<double>() * kDegToRad;
      spec.origin.longitude = o.at("lon_deg").get<double>() * kDegToRad;
      spec.origin.ellipsoidal_height = o.at("height").get<double>();
    }
    if (j.contains("gcp_count")) spec.gcp_count = j["gcp_count"].get<int>();
    if (j.contains("gcp_radius"))
      spec.gcp_radius = j["gcp_radius"].get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
  return spec;
}

// --- derived-file schemas ---------------------------------------------------

constexpr std::string_view kTripletsHeader =
    "t,p0x,p0y,p0z,p1x,p1y,p1z,p2x,p2y,p2z";
constexpr std::string_view kPosesHeader = "t,x,y,z,qw,qx,qy,qz";

std::filesystem::path derived_dir(const std::filesystem::path& exp_dir,
                                  SystemKind system) {
  return exp_dir / "derived" / to_string(system);
}

void write_triplets_csv(const std::filesystem::path& path,
                        const std::vector<SyncTriplet>& triplets) {
  std::ofstream out = open_out(path);
  out << kTripletsHeader << '\n';
  for (const SyncTriplet& tr : triplets) {
    out << csv::format_double(tr.t);
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c)
        out << ',' << csv::format_double(tr.point(i)(c));
    out << '\n';
  }
}

std::vector<SyncTriplet> read_triplets_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const csv::Table table = csv::read_table(in, kTripletsHeader, path.string());
  std::vector<SyncTriplet> out;
  out.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    const auto fields = csv::split_fields(row.text);
    double v[10];
    bool ok = fields.size() == 10;
    for (int i = 0; ok && i < 10; ++i) ok = csv::parse_double(fields[i], v[i]);
    if (!ok)
      throw ConfigError(path.string() + ": malformed row at line " +
                        std::to_string(row.line_number));
    SyncTriplet tr;
    tr.t = v[0];
    tr.p0 = Point3(v[1], v[2], v[3]);
    tr.p1 = Point3(v[4], v[5], v[6]);
    tr.p2 = Point3(v[7], v[8], v[9]);
    out.push_back(tr);
  }
  return out;
}

void write_poses_csv(const std::filesystem::path& path,
                     const std::vector<Pose>& poses) {
  std::ofstream out = open_out(path);
  out << kPosesHeader << '\n';
  for (const Pose& pose : poses) {
    const Eigen::Quaterniond q = to_quaternion(pose.transform.rotation);
    out << csv::format_double(pose.t) << ','
        << csv::format_double(pose.transform.translation.x()) << ','
        << csv::format_double(pose.transform.translation.y()) << ','
        << csv::format_double(pose.transform.translation.z()) << ','
        << csv::format_double(q.w()) << ',' << csv::format_double(q.x()) << ','
        << csv::format_double(q.y()) << ',' << csv::format_double(q.z())
        << '\n';
  }
}

// --- GCP files ---------------------------------------------------------------

struct GcpSet {
  std::vector<std::int64_t> ids;
  std::vector<TimedPoint> points;  // sorted by id, frame = station
};

GcpSet load_gcp_file(const std::filesystem::path& path,
                     const FrameId& expected_station) {
  std::ifstream in = open_in(path);
  const csv::Table table = csv::read_table(in, "gcp_id,x,y,z", path.string());
  const auto station_meta = csv::find_meta(table, "station");
  FrameId station = expected_station;
  if (station_meta) {
    if (!expected_station.empty() && *station_meta != expected_station)
      throw ConfigError(path.string() + ": station metadata '" + *station_meta +
                        "' does not match configured '" + expected_station +
                        "'");
    station = *station_meta;
  }

  std::vector<std::pair<std::int64_t, Point3>> rows;
  rows.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    const auto fields = csv::split_fields(row.text);
    std::int64_t id = 0;
    double xyz[3];
    if (fields.size() != 4 || !csv::parse_int(fields[0], id) ||
        !csv::parse_double(fields[1], xyz[0]) ||
        !csv::parse_double(fields[2], xyz[1]) ||
        !csv::parse_double(fields[3], xyz[2]))
      throw ConfigError(path.string() + ": malformed GCP row at line " +
                        std::to_string(row.line_number));
    rows.emplace_back(id, Point3(xyz[0], xyz[1], xyz[2]));
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  GcpSet set;
  for (const auto& [id, p] : rows) {
    if (!set.ids.empty() && set.ids.back() == id)
      throw ConfigError(path.string() + ": duplicate gcp_id " +
                        std::to_string(id));
    set.ids.push_back(id);
    set.points.push_back(TimedPoint{0.0, p, station});
  }
  return set;
}

// --- calibration persistence -------------------------------------------------

json transform_to_json(const RigidTransform& T) {
  json j;
  j["from"] = T.from;
  j["to"] = T.to;
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot[3 * r + c] = T.rotation(r, c);
  j["rotation"] = rot;
  j["translation"] = {T.translation.x(), T.translation.y(),
                      T.translation.z()};
  return j;
}

RigidTransform transform_from_json(const json& j, const std::string& where) {
  RigidTransform T;
  try {
    T.from = j.at("from").get<std::string>();
    T.to = j.at("to").get<std::string>();
    const auto rot = j.at("rotation").get<std::vector<double>>();
    const auto tr = j.at("translation").get<std::vector<double>>();
    if (rot.size() != 9 || tr.size() != 3)
      throw ConfigError(where + ": bad transform shape");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) T.rotation(r, c) = rot[3 * r + c];
    T.translation = Point3(tr[0], tr[1], tr[2]);
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (!is_orthonormal(T.rotation, 1e-6))
    throw ConfigError(where + ": stored rotation is not orthonormal");
  return T;
}

json body_to_json(const BodyCalibration& body) {
  json j;
  j["d01"] = body.d01;
  j["d02"] = body.d02;
  j["d12"] = body.d12;
  j["triangle_area"] = body.triangle_area();
  return j;
}

BodyCalibration load_body_file(const std::filesystem::path& path,
                               TargetKind expected_kind) {
  std::ifstream in = open_in(path);
  BodyCalibration body = load_body_calibration(in);
  if (body.kind != expected_kind)
    throw ConfigError(path.string() + ": body calibration kind mismatch");
  return body;
}

// --- stream loading ----------------------------------------------------------

struct LoadedStream {
  TargetTrajectory track;
  std::size_t rows_total = 0;
  std::size_t rows_skipped = 0;
  std::size_t quality_dropped = 0;  // gnss only
  std::size_t monotonic_dropped = 0;
  std::size_t speed_dropped = 0;
};

struct LoadedSystem {
  std::array<LoadedStream, 3> streams;
  BodyCalibration body{};
  FrameId frame;
};

json stream_counts_json(const LoadedStream& s) {
  json j;
  j["rows_total"] = s.rows_total;
  j["rows_skipped"] = s.rows_skipped;
  j["quality_dropped"] = s.quality_dropped;
  j["monotonic_dropped"] = s.monotonic_dropped;
  j["speed_gate_dropped"] = s.speed_dropped;
  j["samples"] = s.track.samples.size();
  return j;
}

LoadedSystem load_rts_system(const std::filesystem::path& exp_dir,
                             const SystemConfig& sys, const json& calibration,
                             const PipelineOptions& options) {
  if (sys.stations.size() != 3)
    throw ConfigError("rts config must name 3 stations");
  LoadedSystem out;
  out.body = load_body_file(exp_dir / sys.body, TargetKind::prism);
  out.frame = sys.stations[0];

  if (!calibration.contains("rts"))
    throw ConfigError("calibration.json has no rts section; run calibrate");
  const json& station_entries = calibration["rts"].at("stations");

  for (int k = 0; k < 3; ++k) {
    std::ifstream in = open_in(exp_dir / sys.logs[k]);
    const RtsLog log = parse_rts_log(in, sys.stations[k]);
    if (log.target.index != k)
      throw ConfigError(sys.logs[k] + ": expected target prism" +
                        std::to_string(k) + ", found " +
                        to_string(log.target));

    std::vector<TimedPoint> points;
    points.reserve(log.observations.size());
    for (const RtsObservation& obs : log.observations)
      points.push_back(rts_to_cartesian(obs));

    LoadedStream& stream = out.streams[k];
    stream.rows_total = log.errors.total;
    stream.rows_skipped = log.errors.skipped;
    TargetTrajectory traj = make_trajectory(log.target, log.station, points,
                                            &stream.monotonic_dropped);

    // Map into the common frame (station 0).
    RigidTransform to_common;
    bool found = false;
    for (const json& entry : station_entries) {
      if (entry.at("from").get<std::string>() == log.station) {
        to_common = transform_from_json(entry, "calibration.json");
        found = true;
        break;
      }
    }
    if (!found)
      throw ConfigError("calibration.json has no transform for station '" +
                        log.station + "'");
    traj = transformed(to_common, traj);
    stream.track = speed_gate(traj, options.max_speed, &stream.speed_dropped);
  }
  return out;
}

LoadedSystem load_gnss_system(const std::filesystem::path& exp_dir,
                              const SystemConfig& sys,
                              const PipelineOptions& options) {
  if (sys.origin.empty())
    throw ConfigError("gnss config must reference an origin file");
  LoadedSystem out;
  out.body = load_body_file(exp_dir / sys.body, TargetKind::gnss_antenna);

  std::ifstream origin_in = open_in(exp_dir / sys.origin);
  const GeodeticOrigin origin = parse_origin(origin_in);
  out.frame = enu_frame_id(origin);

  for (int k = 0; k < 3; ++k) {
    std::ifstream in = open_in(exp_dir / sys.logs[k]);
    const GnssLog log = parse_gnss_log(in);
    if (log.target.index != k)
      throw ConfigError(sys.logs[k] + ": expected target gnss" +
                        std::to_string(k) + ", found " + to_string(log.target));

    LoadedStream& stream = out.streams[k];
    stream.rows_total = log.errors.total;
    stream.rows_skipped = log.errors.skipped;

    std::vector<TimedPoint> points;
    points.reserve(log.fixes.size());
    for (const GnssFix& fix : log.fixes) {
      const bool admitted =
          fix.fix_quality == FixQuality::rtk_fixed ||
          (options.admit_float && fix.fix_quality == FixQuality::rtk_float);
      if (!admitted) {
        ++stream.quality_dropped;
        continue;
      }
      points.push_back(geodetic_to_enu(fix, origin));
    }
    TargetTrajectory traj = make_trajectory(log.target, out.frame, points,
                                            &stream.monotonic_dropped);
    stream.track = speed_gate(traj, options.max_speed, &stream.speed_dropped);
  }
  return out;
}

json sync_options_json(const PipelineOptions& options) {
  json j;
  j["max_gap"] = options.sync.max_gap;
  j["reference"] = options.sync.reference == SyncReference::stream0_timestamps
                       ? "stream0"
                       : "grid";
  j["grid_step"] = options.sync.grid_step;
  j["admit_float"] = options.admit_float;
  j["max_speed"] = options.max_speed;
  j["reject_threshold"] = options.reject_threshold;
  return j;
}

json summary_to_json(const MetricSummary& s) {
  json j;
  j["count"] = s.count;
  j["median"] = s.median;
  j["q1"] = s.q1;
  j["q3"] = s.q3;
  j["iqr"] = s.iqr;
  return j;
}

void write_boxplot_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string,
                                                   std::vector<double>>>& series) {
  std::ofstream out = open_out(path);
  out << "series,count,min,q1,median,q3,max\n";
  for (const auto& [name, values] : series) {
    if (values.empty()) {
      out << name << ",0,,,,,\n";
      continue;
    }
    std::vector<double> abs_sorted;
    abs_sorted.reserve(values.size());
    for (const double v : values) abs_sorted.push_back(std::abs(v));
    std::sort(abs_sorted.begin(), abs_sorted.end());
    out << name << ',' << abs_sorted.size() << ','
        << csv::format_double(abs_sorted.front()) << ','
        << csv::format_double(quantile_sorted(abs_sorted, 0.25)) << ','
        << csv::format_double(quantile_sorted(abs_sorted, 0.5)) << ','
        << csv::format_double(quantile_sorted(abs_sorted, 0.75)) << ','
        << csv::format_double(abs_sorted.back()) << '\n';
  }
}

// Recomputes pose residuals to drop outlier triplets (flags are never stored
// in triplets.csv; the residual gate is deterministic).
std::vector<SyncTriplet> filter_outliers(const std::vector<SyncTriplet>& triplets,
                                         const BodyCalibration& body,
                                         const FrameId& frame,
                                         double reject_threshold,
                                         std::size_t* excluded) {
  std::vector<SyncTriplet> kept;
  kept.reserve(triplets.size());
  std::size_t dropped = 0;
  for (const SyncTriplet& tr : triplets) {
    bool keep = true;
    try {
      keep = !reconstruct_pose(tr, body, frame, reject_threshold).outlier;
    } catch (const Error&) {
      keep = false;  // degenerate triplet: treat as excluded
    }
    if (keep)
      kept.push_back(tr);
    else
      ++dropped;
  }
  if (excluded) *excluded = dropped;
  return kept;
}

struct SystemArtifacts {
  SystemKind system;
  std::vector<SyncTriplet> triplets;
  BodyCalibration body{};
  json run_options;
  std::size_t excluded = 0;
};

// Loads reconstructed triplets (+ body calibration and the reconstruction
// metadata) for one system of one experiment, applying the outlier filter
// when requested. Returns nullopt when the system was never reconstructed.
std::optional<SystemArtifacts> load_artifacts(
    const std::filesystem::path& exp_dir, const ExperimentConfig& exp,
    SystemKind system, const PipelineOptions& options) {
  const std::optional<SystemConfig>& sys =
      system == SystemKind::rts ? exp.rts : exp.gnss;
  if (!sys) return std::nullopt;
  const std::filesystem::path triplets_path =
      derived_dir(exp_dir, system) / "triplets.csv";
  if (!std::filesystem::exists(triplets_path)) return std::nullopt;

  SystemArtifacts art;
  art.system = system;
  art.body = load_body_file(exp_dir / sys->body,
                            system == SystemKind::rts
                                ? TargetKind::prism
                                : TargetKind::gnss_antenna);
  art.triplets = read_triplets_csv(triplets_path);
  const json run = read_json_file(derived_dir(exp_dir, system) / "run.json");
  art.run_options = run.contains("options") ? run["options"] : json::object();
  if (options.exclude_outliers)
    art.triplets = filter_outliers(art.triplets, art.body, "world",
                                   options.reject_threshold, &art.excluded);
  return art;
}

}  // namespace

std::string to_string(SystemKind system) {
  return system == SystemKind::rts ? "rts" : "gnss";
}

SystemKind system_from_string(const std::string& name) {
  if (name == "rts") return SystemKind::rts;
  if (name == "gnss") return SystemKind::gnss;
  throw ConfigError("unknown system '" + name + "', expected rts or gnss");
}

const SystemConfig& ExperimentConfig::require(SystemKind system) const {
  const std::optional<SystemConfig>& sys =
      system == SystemKind::rts ? rts : gnss;
  if (!sys)
    throw ConfigError("experiment '" + id + "' has no " + to_string(system) +
                      " system configured");
  return *sys;
}

WorkspaceConfig WorkspaceConfig::load(const std::filesystem::path& workspace) {
  const std::filesystem::path path = workspace / "config.json";
  if (!std::filesystem::exists(path))
    throw ConfigError("no workspace config at '" + path.string() + "'");
  const json doc = read_json_file(path);
  WorkspaceConfig cfg;
  try {
    cfg.schema_version = doc.at("schema_version").get<int>();
    if (cfg.schema_version != 1)
      throw ConfigError("unsupported config schema_version " +
                        std::to_string(cfg.schema_version));
    for (const json& e : doc.at("experiments")) {
      ExperimentConfig exp;
      exp.id = e.at("id").get<std::string>();
      if (e.contains("rts"))
        exp.rts = system_from_json(e["rts"], "config experiment " + exp.id);
      if (e.contains("gnss"))
        exp.gnss = system_from_json(e["gnss"], "config experiment " + exp.id);
      cfg.experiments.push_back(std::move(exp));
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return cfg;
}

void WorkspaceConfig::save(const std::filesystem::path& workspace) const {
  json doc;
  doc["schema_version"] = schema_version;
  doc["experiments"] = json::array();
  for (const ExperimentConfig& exp : experiments) {
    json e;
    e["id"] = exp.id;
    if (exp.rts) e["rts"] = system_to_json(*exp.rts);
    if (exp.gnss) e["gnss"] = system_to_json(*exp.gnss);
    doc["experiments"].push_back(std::move(e));
  }
  write_json_file(workspace / "config.json", doc);
}

const ExperimentConfig& WorkspaceConfig::require(const std::string& id) const {
  for (const ExperimentConfig& exp : experiments)
    if (exp.id == id) return exp;
  throw ConfigError("experiment '" + id + "' is not in the workspace config");
}

void WorkspaceConfig::upsert(ExperimentConfig experiment) {
  for (ExperimentConfig& exp : experiments)
    if (exp.id == experiment.id) {
      exp = std::move(experiment);
      return;
    }
  experiments.push_back(std::move(experiment));
  std::sort(experiments.begin(), experiments.end(),
            [](const ExperimentConfig& a, const ExperimentConfig& b) {
              return a.id < b.id;
            });
}

void cmd_synth(const std::filesystem::path& spec_file,
               const std::filesystem::path& workspace,
               std::optional<std::uint64_t> seed_override) {
  SynthSpec spec = synth_spec_from_json(read_json_file(spec_file));
  if (seed_override) spec.noise.seed = *seed_override;
  spec.validate();

  write_bundle(spec, workspace / spec.id);

  WorkspaceConfig cfg;
  if (std::filesystem::exists(workspace / "config.json"))
    cfg = WorkspaceConfig::load(workspace);
  ExperimentConfig exp;
  exp.id = spec.id;
  if (spec.with_rts) {
    SystemConfig sys;
    for (int k = 0; k < 3; ++k) sys.logs.push_back(rts_log_name(k));
    for (int k = 0; k < 3; ++k) sys.gcp.push_back(gcp_file_name(k));
    for (int k = 0; k < 3; ++k) sys.stations.push_back(spec.stations[k].name);
    sys.body = std::string(kPrismBodyFile);
    exp.rts = std::move(sys);
  }
  if (spec.with_gnss) {
    SystemConfig sys;
    for (int k = 0; k < 3; ++k) sys.logs.push_back(gnss_log_name(k));
    sys.body = std::string(kGnssBodyFile);
    sys.origin = std::string(kOriginFile);
    exp.gnss = std::move(sys);
  }
  cfg.upsert(std::move(exp));
  cfg.save(workspace);

  std::cout << "synthesized experiment '" << spec.id << "' (seed "
            << spec.noise.seed << ") into "
            << (workspace / spec.id).string() << "\n";
}

void cmd_calibrate(const std::filesystem::path& workspace,
                   const std::string& id) {
  const WorkspaceConfig cfg = WorkspaceConfig::load(workspace);
  const ExperimentConfig& exp = cfg.require(id);
  const std::filesystem::path exp_dir = workspace / id;

  json doc;
  doc["schema_version"] = 1;
  doc["tool_version"] = std::string(kToolVersion);
  doc["experiment"] = id;

  if (exp.rts) {
    const SystemConfig& sys = *exp.rts;
    if (sys.gcp.size() != 3 || sys.stations.size() != 3)
      throw ConfigError("rts config needs 3 GCP files and 3 station names");

    std::array<GcpSet, 3> gcps;
    for (int k = 0; k < 3; ++k)
      gcps[k] = load_gcp_file(exp_dir / sys.gcp[k], sys.stations[k]);
    for (int k = 1; k < 3; ++k)
      if (gcps[k].ids != gcps[0].ids)
        throw ConfigError("GCP id sets of '" + sys.gcp[0] + "' and '" +
                          sys.gcp[k] + "' differ");

    json stations = json::array();
    {
      // Station 0 anchors the common frame.
      json e = transform_to_json(RigidTransform::identity(sys.stations[0]));
      e["rmse"] = 0.0;
      e["gcp_count"] = gcps[0].ids.size();
      e["warning"] = nullptr;
      stations.push_back(std::move(e));
    }
    for (int k = 1; k < 3; ++k) {
      const StationCalibration calib =
          calibrate_station_pair(gcps[0].points, gcps[k].points);
      json e = transform_to_json(calib.alignment.transform);
      e["rmse"] = calib.alignment.rmse;
      e["gcp_count"] = calib.gcp_count;
      e["warning"] = calib.warning ? json(*calib.warning) : json(nullptr);
      stations.push_back(std::move(e));
      std::cout << sys.stations[k] << " -> " << sys.stations[0] << ": rmse "
                << csv::format_double(calib.alignment.rmse) << " m over "
                << calib.gcp_count << " GCPs\n";
      if (calib.warning) std::cout << "warning: " << *calib.warning << "\n";
    }
    doc["rts"]["stations"] = std::move(stations);
    doc["rts"]["body"] =
        body_to_json(load_body_file(exp_dir / sys.body, TargetKind::prism));
  }

  if (exp.gnss) {
    const SystemConfig& sys = *exp.gnss;
    doc["gnss"]["body"] = body_to_json(
        load_body_file(exp_dir / sys.body, TargetKind::gnss_antenna));
    if (sys.origin.empty())
      throw ConfigError("gnss config must reference an origin file");
    std::ifstream in = open_in(exp_dir / sys.origin);
    const GeodeticOrigin origin = parse_origin(in);
    doc["gnss"]["origin"] = {{"lat_deg", origin.latitude * kRadToDeg},
                             {"lon_deg", origin.longitude * kRadToDeg},
                             {"height", origin.ellipsoidal_height}};
  }

  if (!exp.rts && !exp.gnss)
    throw ConfigError("experiment '" + id + "' configures no system");

  write_json_file(exp_dir / "derived" / "calibration.json", doc);
  std::cout << "calibration written for '" << id << "'\n";
}

void cmd_reconstruct(const std::filesystem::path& workspace,
                     const std::string& id, SystemKind system,
                     const PipelineOptions& options) {
  options.sync.validate();
  const WorkspaceConfig cfg = WorkspaceConfig::load(workspace);
  const ExperimentConfig& exp = cfg.require(id);
  const SystemConfig& sys = exp.require(system);
  const std::filesystem::path exp_dir = workspace / id;

  const std::filesystem::path calib_path =
      exp_dir / "derived" / "calibration.json";
  if (!std::filesystem::exists(calib_path))
    throw ConfigError("no calibration for '" + id +
                      "'; run 'gtruth calibrate' first");
  const json calibration = read_json_file(calib_path);

  LoadedSystem loaded =
      system == SystemKind::rts
          ? load_rts_system(exp_dir, sys, calibration, options)
          : load_gnss_system(exp_dir, sys, options);

  const std::vector<SyncTriplet> triplets =
      form_triplets(loaded.streams[0].track, loaded.streams[1].track,
                    loaded.streams[2].track, options.sync);
  if (triplets.empty())
    throw DataError("no synchronous triplets: streams do not overlap within "
                    "max_gap " +
                    csv::format_double(options.sync.max_gap) + " s");

  const Reconstruction recon = reconstruct_trajectory(
      triplets, loaded.body, loaded.frame, options.reject_threshold);

  const std::filesystem::path out_dir = derived_dir(exp_dir, system);
  write_triplets_csv(out_dir / "triplets.csv", triplets);
  write_poses_csv(out_dir / "poses.csv", recon.poses);

  json run;
  run["schema_version"] = 1;
  run["tool_version"] = std::string(kToolVersion);
  run["experiment"] = id;
  run["system"] = to_string(system);
  run["options"] = sync_options_json(options);
  run["streams"] = json::array();
  for (const LoadedStream& s : loaded.streams)
    run["streams"].push_back(stream_counts_json(s));
  run["triplets"] = triplets.size();
  run["poses"] = recon.poses.size();
  run["outliers"] = recon.outlier_count;
  run["issues"] = json::array();
  for (const ReconstructionIssue& issue : recon.issues)
    run["issues"].push_back({{"index", issue.index}, {"reason", issue.reason}});
  write_json_file(out_dir / "run.json", run);

  std::cout << to_string(system) << ": " << triplets.size() << " triplets, "
            << recon.poses.size() << " poses, " << recon.outlier_count
            << " outliers, " << recon.issues.size() << " degenerate\n";
}

void cmd_evaluate(const std::filesystem::path& workspace, const std::string& id,
                  const PipelineOptions& options) {
  const WorkspaceConfig cfg = WorkspaceConfig::load(workspace);
  const ExperimentConfig& exp = cfg.require(id);
  const std::filesystem::path exp_dir = workspace / id;

  json doc;
  doc["schema_version"] = 1;
  doc["tool_version"] = std::string(kToolVersion);
  doc["experiment"] = id;
  doc["metadata"] = {{"kind", "inter_distance"},
                     {"quantile_convention", "type7_linear"},
                     {"summaries_on", "absolute_errors"},
                     {"records", "signed"},
                     {"exclude_outliers", options.exclude_outliers},
                     {"reject_threshold", options.reject_threshold}};

  bool any = false;
  for (const SystemKind system : {SystemKind::rts, SystemKind::gnss}) {
    const auto art = load_artifacts(exp_dir, exp, system, options);
    if (!art) continue;
    any = true;

    const std::vector<InterDistanceRecord> records =
        inter_distance_errors(art->triplets, art->body);
    std::vector<double> pooled;
    std::array<std::vector<double>, 3> per_pair;
    std::vector<double> times;
    pooled.reserve(records.size() * 3);
    times.reserve(records.size());
    for (const InterDistanceRecord& r : records) {
      times.push_back(r.t);
      for (int k = 0; k < 3; ++k) {
        pooled.push_back(r.pair(k));
        per_pair[k].push_back(r.pair(k));
      }
    }

    json sys_doc;
    sys_doc["reconstruction"] = art->run_options;
    sys_doc["triplets"] = art->triplets.size();
    sys_doc["excluded_outliers"] = art->excluded;
    if (!pooled.empty()) {
      sys_doc["pooled"] = summary_to_json(summarize(pooled));
      sys_doc["per_pair"] = {{"e01", summary_to_json(summarize(per_pair[0]))},
                             {"e02", summary_to_json(summarize(per_pair[1]))},
                             {"e12", summary_to_json(summarize(per_pair[2]))}};
    } else {
      sys_doc["pooled"] = nullptr;
      sys_doc["per_pair"] = nullptr;
    }
    sys_doc["raw"] = {{"t", times},
                      {"e01", per_pair[0]},
                      {"e02", per_pair[1]},
                      {"e12", per_pair[2]}};
    doc["systems"][to_string(system)] = std::move(sys_doc);

    // Plot exports: raw signed series plus |error| five-number summaries.
    {
      std::ofstream out = open_out(exp_dir / "reports" /
                                   ("intra_errors_" + to_string(system) +
                                    ".csv"));
      out << "t,e01,e02,e12\n";
      for (const InterDistanceRecord& r : records)
        out << csv::format_double(r.t) << ',' << csv::format_double(r.e01)
            << ',' << csv::format_double(r.e02) << ','
            << csv::format_double(r.e12) << '\n';
    }
    write_boxplot_csv(
        exp_dir / "reports" / ("intra_boxplot_" + to_string(system) + ".csv"),
        {{"pooled", pooled},
         {"e01", per_pair[0]},
         {"e02", per_pair[1]},
         {"e12", per_pair[2]}});

    if (!pooled.empty()) {
      const MetricSummary s = summarize(pooled);
      std::cout << to_string(system) << ": median "
                << csv::format_double(s.median) << " m, IQR "
                << csv::format_double(s.iqr) << " m over " << s.count
                << " pair errors\n";
    }
  }

  if (!any)
    throw ConfigError("experiment '" + id +
                      "' has no reconstructed system; run reconstruct first");
  write_json_file(exp_dir / "reports" / "report.json", doc);
}

void cmd_compare(const std::filesystem::path& workspace,
                 const std::string& id_a, const std::string& id_b,
                 const PipelineOptions& options) {
  if (!(options.radius > 0.0) || !std::isfinite(options.radius))
    throw ConfigError("--radius must be > 0");
  const WorkspaceConfig cfg = WorkspaceConfig::load(workspace);
  const ExperimentConfig& exp_a = cfg.require(id_a);
  const ExperimentConfig& exp_b = cfg.require(id_b);
  const std::filesystem::path dir_a = workspace / id_a;
  const std::filesystem::path dir_b = workspace / id_b;

  json doc;
  doc["schema_version"] = 1;
  doc["tool_version"] = std::string(kToolVersion);
  doc["experiment_a"] = id_a;
  doc["experiment_b"] = id_b;
  doc["metadata"] = {
      {"kind", "inter_experiment"},
      {"quantile_convention", "type7_linear"},
      {"summaries_on", "absolute_errors"},
      {"radius", options.radius},
      {"match_anchor",
       options.match_anchor == MatchAnchorKind::target0 ? "target0"
                                                        : "centroid"},
      {"exclude_outliers", options.exclude_outliers},
      {"reject_threshold", options.reject_threshold}};

  bool any = false;
  for (const SystemKind system : {SystemKind::rts, SystemKind::gnss}) {
    const auto art_a = load_artifacts(dir_a, exp_a, system, options);
    const auto art_b = load_artifacts(dir_b, exp_b, system, options);
    if (!art_a || !art_b) continue;
    any = true;

    const auto anchors = [&](const std::vector<SyncTriplet>& triplets) {
      std::vector<Point3> out;
      out.reserve(triplets.size());
      for (const SyncTriplet& tr : triplets)
        out.push_back(options.match_anchor == MatchAnchorKind::target0
                          ? tr.p0
                          : tr.centroid());
      return out;
    };

    const std::vector<MatchPair> matches =
        nn_match(anchors(art_a->triplets), anchors(art_b->triplets),
                 options.radius);
    const std::vector<InterDistanceRecord> rec_a =
        inter_distance_errors(art_a->triplets, art_a->body);
    const std::vector<InterDistanceRecord> rec_b =
        inter_distance_errors(art_b->triplets, art_b->body);
    const std::vector<double> disparities =
        inter_experiment_errors(rec_a, rec_b, matches);

    json sys_doc;
    sys_doc["reconstruction_a"] = art_a->run_options;
    sys_doc["reconstruction_b"] = art_b->run_options;
    sys_doc["matches"] = matches.size();
    sys_doc["excluded_outliers_a"] = art_a->excluded;
    sys_doc["excluded_outliers_b"] = art_b->excluded;
    sys_doc["count"] = disparities.size();
    sys_doc["summary"] =
        disparities.empty() ? json(nullptr)
                            : summary_to_json(summarize(disparities));
    {
      json raw;
      std::vector<std::size_t> ia, ib;
      std::vector<double> sep;
      std::array<std::vector<double>, 3> pair_disp;
      ia.reserve(matches.size());
      for (std::size_t m = 0; m < matches.size(); ++m) {
        ia.push_back(matches[m].index_a);
        ib.push_back(matches[m].index_b);
        sep.push_back(matches[m].separation);
        for (int k = 0; k < 3; ++k)
          pair_disp[k].push_back(disparities[3 * m + k]);
      }
      raw["index_a"] = ia;
      raw["index_b"] = ib;
      raw["separation"] = sep;
      raw["d01"] = pair_disp[0];
      raw["d02"] = pair_disp[1];
      raw["d12"] = pair_disp[2];
      sys_doc["raw"] = std::move(raw);

      const std::string stem = "compare_" + id_a + "_vs_" + id_b + "_" +
                               to_string(system);
      std::ofstream out = open_out(dir_a / "reports" / (stem + ".csv"));
      out << "index_a,index_b,separation,d01,d02,d12\n";
      for (std::size_t m = 0; m < matches.size(); ++m)
        out << ia[m] << ',' << ib[m] << ',' << csv::format_double(sep[m])
            << ',' << csv::format_double(pair_disp[0][m]) << ','
            << csv::format_double(pair_disp[1][m]) << ','
            << csv::format_double(pair_disp[2][m]) << '\n';
      write_boxplot_csv(dir_a / "reports" / (stem + "_boxplot.csv"),
                        {{"pooled", disparities},
                         {"d01", pair_disp[0]},
                         {"d02", pair_disp[1]},
                         {"d12", pair_disp[2]}});
    }
    doc["systems"][to_string(system)] = std::move(sys_doc);

    if (!disparities.empty()) {
      const MetricSummary s = summarize(disparities);
      std::cout << to_string(system) << ": " << matches.size()
                << " matches, disparity median " << csv::format_double(s.median)
                << " m, IQR " << csv::format_double(s.iqr) << " m\n";
    } else {
      std::cout << to_string(system) << ": 0 matches within radius "
                << csv::format_double(options.radius) << " m\n";
    }
  }

  if (!any)
    throw ConfigError("experiments '" + id_a + "' and '" + id_b +
                      "' share no reconstructed system");
  write_json_file(
      dir_a / "reports" / ("compare_" + id_a + "_vs_" + id_b + ".json"), doc);
}

}  // namespace gtruth
