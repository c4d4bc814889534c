#include "gtruth/ingest.hpp"

#include "gtruth/csvio.hpp"

#include <cmath>
#include <istream>
#include <numbers>

namespace gtruth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr std::size_t kMaxReportedRows = 20;

void note_skip(RowErrors& errors, std::size_t line, const std::string& reason) {
  ++errors.skipped;
  if (errors.messages.size() < kMaxReportedRows)
    errors.messages.push_back(std::to_string(line) + ": " + reason);
}

// >10% skipped rows signal the wrong file; abort instead of limping on.
void enforce_skip_budget(const RowErrors& errors, std::string_view what) {
  if (errors.total == 0 || errors.skipped * 10 <= errors.total) return;
  std::string msg = std::string(what) + ": " + std::to_string(errors.skipped) +
                    " of " + std::to_string(errors.total) +
                    " rows skipped (>10%), refusing input";
  for (const std::string& m : errors.messages) msg += "\n  row " + m;
  throw ConfigError(msg);
}

TargetId parse_target_meta(const csv::Table& table, TargetKind kind,
                           std::string_view what) {
  const auto value = csv::find_meta(table, "target");
  if (!value)
    throw ConfigError(std::string(what) + ": missing '# target=...' metadata");
  const std::string_view prefix =
      kind == TargetKind::prism ? "prism" : "gnss";
  if (value->size() == prefix.size() + 1 && value->starts_with(prefix)) {
    const char digit = value->back();
    if (digit >= '0' && digit <= '2')
      return TargetId{kind, digit - '0'};
  }
  throw ConfigError(std::string(what) + ": bad target '" + *value +
                    "', expected " + std::string(prefix) + "<0|1|2>");
}

double wrap_longitude(double lon) {
  double l = std::fmod(lon + kPi, 2.0 * kPi);
  if (l < 0.0) l += 2.0 * kPi;
  l -= kPi;
  return l < kPi ? l : -kPi;
}

}  // namespace

std::string to_string(FixQuality q) {
  switch (q) {
    case FixQuality::rtk_fixed: return "FIX";
    case FixQuality::rtk_float: return "FLOAT";
    case FixQuality::single: return "SINGLE";
  }
  throw ConfigError("invalid fix quality value");
}

RtsLog parse_rts_log(std::istream& in, const FrameId& station) {
  const csv::Table table =
      csv::read_table(in, "t,azimuth,elevation,slant_distance", "rts log");

  RtsLog log;
  const auto file_station = csv::find_meta(table, "station");
  if (file_station && !station.empty() && *file_station != station)
    throw ConfigError("rts log: station metadata '" + *file_station +
                      "' does not match expected '" + station + "'");
  log.station = file_station ? *file_station : station;
  if (log.station.empty())
    throw ConfigError("rts log: no station given (neither metadata nor caller)");
  log.target = parse_target_meta(table, TargetKind::prism, "rts log");

  const auto unit = csv::find_meta(table, "angle_unit");
  if (!unit)
    throw ConfigError("rts log: missing '# angle_unit=<deg|rad>' metadata");
  double angle_scale = 0.0;
  if (*unit == "deg")
    angle_scale = kDegToRad;
  else if (*unit == "rad")
    angle_scale = 1.0;
  else
    throw ConfigError("rts log: bad angle_unit '" + *unit + "'");

  log.errors.total = table.rows.size();
  log.observations.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    const auto fields = csv::split_fields(row.text);
    if (fields.size() != 4) {
      note_skip(log.errors, row.line_number, "expected 4 fields");
      continue;
    }
    double vals[4];
    bool ok = true;
    for (int i = 0; i < 4; ++i)
      ok = ok && csv::parse_double(fields[i], vals[i]) && std::isfinite(vals[i]);
    if (!ok) {
      note_skip(log.errors, row.line_number, "non-numeric field");
      continue;
    }
    RtsObservation obs;
    obs.t = vals[0];
    obs.azimuth = vals[1] * angle_scale;
    obs.elevation = vals[2] * angle_scale;
    obs.slant_distance = vals[3];
    obs.station = log.station;
    obs.target = log.target;
    if (!(obs.slant_distance > 0.0)) {
      note_skip(log.errors, row.line_number, "slant_distance must be > 0");
      continue;
    }
    if (!(std::abs(obs.elevation) < kPi / 2.0)) {
      note_skip(log.errors, row.line_number, "|elevation| must be < pi/2");
      continue;
    }
    obs.azimuth = std::fmod(obs.azimuth, 2.0 * kPi);
    if (obs.azimuth < 0.0) obs.azimuth += 2.0 * kPi;
    if (obs.azimuth >= 2.0 * kPi) obs.azimuth = 0.0;
    log.observations.push_back(obs);
  }
  enforce_skip_budget(log.errors, "rts log");
  return log;
}

GnssLog parse_gnss_log(std::istream& in) {
  const csv::Table table =
      csv::read_table(in, "t,lat,lon,height,quality", "gnss log");

  GnssLog log;
  log.target = parse_target_meta(table, TargetKind::gnss_antenna, "gnss log");

  log.errors.total = table.rows.size();
  log.fixes.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    const auto fields = csv::split_fields(row.text);
    if (fields.size() != 5) {
      note_skip(log.errors, row.line_number, "expected 5 fields");
      continue;
    }
    double vals[4];
    bool ok = true;
    for (int i = 0; i < 4; ++i)
      ok = ok && csv::parse_double(fields[i], vals[i]) && std::isfinite(vals[i]);
    if (!ok) {
      note_skip(log.errors, row.line_number, "non-numeric field");
      continue;
    }
    GnssFix fix;
    fix.t = vals[0];
    fix.latitude = vals[1] * kDegToRad;
    fix.longitude = vals[2] * kDegToRad;
    fix.ellipsoidal_height = vals[3];
    fix.target = log.target;
    if (fields[4] == "FIX")
      fix.fix_quality = FixQuality::rtk_fixed;
    else if (fields[4] == "FLOAT")
      fix.fix_quality = FixQuality::rtk_float;
    else if (fields[4] == "SINGLE")
      fix.fix_quality = FixQuality::single;
    else {
      note_skip(log.errors, row.line_number,
                "bad quality token '" + std::string(fields[4]) + "'");
      continue;
    }
    if (!(std::abs(fix.latitude) <= kPi / 2.0)) {
      note_skip(log.errors, row.line_number, "|lat| must be <= 90 deg");
      continue;
    }
    fix.longitude = wrap_longitude(fix.longitude);
    log.fixes.push_back(fix);
  }
  enforce_skip_budget(log.errors, "gnss log");
  return log;
}

GeodeticOrigin parse_origin(std::istream& in) {
  const csv::Table table = csv::read_table(in, "lat,lon,height", "origin file");
  if (table.rows.size() != 1)
    throw ConfigError("origin file: expected exactly one data row, got " +
                      std::to_string(table.rows.size()));
  const auto fields = csv::split_fields(table.rows.front().text);
  double vals[3];
  if (fields.size() != 3 || !csv::parse_double(fields[0], vals[0]) ||
      !csv::parse_double(fields[1], vals[1]) ||
      !csv::parse_double(fields[2], vals[2]))
    throw ConfigError("origin file: malformed data row");
  GeodeticOrigin origin;
  origin.latitude = vals[0] * kDegToRad;
  origin.longitude = vals[1] * kDegToRad;
  origin.ellipsoidal_height = vals[2];
  if (!(std::abs(origin.latitude) <= kPi / 2.0) ||
      !std::isfinite(origin.longitude) ||
      !std::isfinite(origin.ellipsoidal_height))
    throw ConfigError("origin file: coordinates out of bounds");
  origin.longitude = wrap_longitude(origin.longitude);
  return origin;
}

TimedPoint rts_to_cartesian(const RtsObservation& obs) {
  const double ce = std::cos(obs.elevation);
  TimedPoint pt;
  pt.t = obs.t;
  pt.p = Point3(obs.slant_distance * ce * std::sin(obs.azimuth),
                obs.slant_distance * ce * std::cos(obs.azimuth),
                obs.slant_distance * std::sin(obs.elevation));
  pt.frame = obs.station;
  return pt;
}

namespace wgs84 {

Eigen::Vector3d geodetic_to_ecef(double lat, double lon, double height) {
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double n = kSemiMajorAxis / std::sqrt(1.0 - kEccentricitySq * sl * sl);
  return {(n + height) * cl * std::cos(lon), (n + height) * cl * std::sin(lon),
          (n * (1.0 - kEccentricitySq) + height) * sl};
}

Eigen::Matrix3d enu_rotation(double lat, double lon) {
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double so = std::sin(lon), co = std::cos(lon);
  Eigen::Matrix3d r;
  r << -so, co, 0.0,                 // east
      -sl * co, -sl * so, cl,        // north
      cl * co, cl * so, sl;          // up
  return r;
}

Eigen::Vector3d ecef_to_geodetic(const Eigen::Vector3d& ecef) {
  const double a = kSemiMajorAxis;
  const double e2 = kEccentricitySq;
  const double b = a * (1.0 - kFlattening);
  const double ep2 = e2 / (1.0 - e2);

  const double p = std::hypot(ecef.x(), ecef.y());
  const double lon = std::atan2(ecef.y(), ecef.x());

  // Bowring's starting value, then fixed-point refinement.
  const double theta = std::atan2(ecef.z() * a, p * b);
  const double st = std::sin(theta), ct = std::cos(theta);
  double lat = std::atan2(ecef.z() + ep2 * b * st * st * st,
                          p - e2 * a * ct * ct * ct);
  double h = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double sl = std::sin(lat);
    const double n = a / std::sqrt(1.0 - e2 * sl * sl);
    if (std::abs(lat) < 1.18)  // ~67.6 deg: p-based height is well conditioned
      h = p / std::cos(lat) - n;
    else
      h = ecef.z() / sl - n * (1.0 - e2);
    lat = std::atan2(ecef.z(), p * (1.0 - e2 * n / (n + h)));
  }
  return {lat, lon, h};
}

}  // namespace wgs84

FrameId enu_frame_id(const GeodeticOrigin&) { return "enu@origin"; }

TimedPoint geodetic_to_enu(const GnssFix& fix, const GeodeticOrigin& origin) {
  const Eigen::Vector3d ecef = wgs84::geodetic_to_ecef(
      fix.latitude, fix.longitude, fix.ellipsoidal_height);
  const Eigen::Vector3d ecef0 = wgs84::geodetic_to_ecef(
      origin.latitude, origin.longitude, origin.ellipsoidal_height);
  TimedPoint pt;
  pt.t = fix.t;
  pt.p = wgs84::enu_rotation(origin.latitude, origin.longitude) * (ecef - ecef0);
  pt.frame = enu_frame_id(origin);
  return pt;
}

Eigen::Vector3d enu_to_geodetic(const Point3& enu, const GeodeticOrigin& origin) {
  const Eigen::Vector3d ecef0 = wgs84::geodetic_to_ecef(
      origin.latitude, origin.longitude, origin.ellipsoidal_height);
  const Eigen::Matrix3d r0 =
      wgs84::enu_rotation(origin.latitude, origin.longitude);
  const Eigen::Vector3d target = ecef0 + r0.transpose() * enu;

  Eigen::Vector3d g = wgs84::ecef_to_geodetic(target);
  // Newton polish on the forward map; drives the round-trip error to the
  // floating-point floor (~1e-9 m at Earth scale).
  for (int i = 0; i < 2; ++i) {
    const Eigen::Vector3d fwd = wgs84::geodetic_to_ecef(g.x(), g.y(), g.z());
    const Eigen::Vector3d local =
        wgs84::enu_rotation(g.x(), g.y()) * (target - fwd);
    const double sl = std::sin(g.x());
    const double w = std::sqrt(1.0 - wgs84::kEccentricitySq * sl * sl);
    const double n = wgs84::kSemiMajorAxis / w;
    const double m =
        wgs84::kSemiMajorAxis * (1.0 - wgs84::kEccentricitySq) / (w * w * w);
    const double cl = std::max(std::cos(g.x()), 1e-12);
    g.x() += local.y() / (m + g.z());
    g.y() += local.x() / ((n + g.z()) * cl);
    g.z() += local.z();
  }
  g.y() = wrap_longitude(g.y());
  return g;
}

}  // namespace gtruth
