#pragma once

#include "gtruth/core.hpp"

#include <iosfwd>
#include <optional>

namespace gtruth {

enum class FixQuality { rtk_fixed, rtk_float, single };

std::string to_string(FixQuality q);

// One robotic-total-station measurement of a prism. Angles are radians:
// azimuth clockwise from the instrument +Y axis, normalized to [0, 2*pi);
// elevation from the horizontal plane, in (-pi/2, pi/2).
struct RtsObservation {
  Timestamp t = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double slant_distance = 0.0;  // meters, > 0
  FrameId station;
  TargetId target;
};

// One RTK fix. Latitude/longitude are radians internally (files hold decimal
// degrees), height is ellipsoidal meters.
struct GnssFix {
  Timestamp t = 0.0;
  double latitude = 0.0;   // [-pi/2, pi/2]
  double longitude = 0.0;  // [-pi, pi)
  double ellipsoidal_height = 0.0;
  FixQuality fix_quality = FixQuality::rtk_fixed;
  TargetId target;
};

struct GeodeticOrigin {
  double latitude = 0.0;  // radians
  double longitude = 0.0;
  double ellipsoidal_height = 0.0;
};

// Parse outcome. Rows that fail validation are skipped and reported with
// their line numbers; a malformed header or metadata block throws
// ConfigError, and so does a skipped-row fraction above 10%.
struct RowErrors {
  std::size_t skipped = 0;
  std::size_t total = 0;
  std::vector<std::string> messages;  // "<line>: reason", capped
};

struct RtsLog {
  FrameId station;
  TargetId target;
  std::vector<RtsObservation> observations;
  RowErrors errors;
};

struct GnssLog {
  TargetId target;
  std::vector<GnssFix> fixes;
  RowErrors errors;
};

// Header: t,azimuth,elevation,slant_distance. Metadata comments: station=<id>
// (must match `station` when both are given), target=prism<0|1|2>,
// angle_unit=<deg|rad>.
RtsLog parse_rts_log(std::istream& in, const FrameId& station = {});

// Header: t,lat,lon,height,quality with quality in {FIX, FLOAT, SINGLE};
// metadata comment target=gnss<0|1|2>.
GnssLog parse_gnss_log(std::istream& in);

// Single data row "lat,lon,height" in decimal degrees / meters; a header
// line "lat,lon,height" is required.
GeodeticOrigin parse_origin(std::istream& in);

// Polar-to-Cartesian in the station frame:
//   x = d*cos(e)*sin(a), y = d*cos(e)*cos(a), z = d*sin(e).
TimedPoint rts_to_cartesian(const RtsObservation& obs);

// Geodetic -> ECEF -> local east/north/up at `origin`. The ENU frame id is
// enu_frame_id(origin).
TimedPoint geodetic_to_enu(const GnssFix& fix, const GeodeticOrigin& origin);

FrameId enu_frame_id(const GeodeticOrigin& origin);

// WGS-84 primitives shared with the synthesizer.
namespace wgs84 {
inline constexpr double kSemiMajorAxis = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);

Eigen::Vector3d geodetic_to_ecef(double lat, double lon, double height);
// Rows are the east/north/up unit vectors at (lat, lon).
Eigen::Matrix3d enu_rotation(double lat, double lon);
// Bowring's approximation polished with Newton steps on the forward map;
// returns (lat, lon, height).
Eigen::Vector3d ecef_to_geodetic(const Eigen::Vector3d& ecef);
}  // namespace wgs84

// Inverse of geodetic_to_enu; returns (lat, lon, height) in radians/meters.
Eigen::Vector3d enu_to_geodetic(const Point3& enu, const GeodeticOrigin& origin);

}  // namespace gtruth
