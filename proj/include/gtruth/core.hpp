#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>
#include <vector>

namespace gtruth {

using Timestamp = double;  // seconds since the experiment epoch
using Point3 = Eigen::Vector3d;
using FrameId = std::string;

// Error hierarchy. Categories map onto the CLI exit codes: ConfigError -> 2,
// DataError -> 3, DegeneracyError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unusable input or configuration: malformed file, missing path, bad flag.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inputs are well-formed but insufficient: empty overlap, all rows rejected.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerically degenerate geometry: collinear points, zero-area body.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

enum class TargetKind { prism, gnss_antenna };

struct TargetId {
  TargetKind kind = TargetKind::prism;
  int index = 0;  // 0..2, three targets per positioning system

  bool operator==(const TargetId&) const = default;
};

std::string to_string(const TargetId& id);

struct TimedPoint {
  Timestamp t = 0.0;
  Point3 p = Point3::Zero();
  FrameId frame;
};

// Proper rigid transform mapping points in `from` coordinates to `to`
// coordinates: p_to = rotation * p_from + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Point3 translation = Point3::Zero();
  FrameId from;
  FrameId to;

  static RigidTransform identity(FrameId frame);
};

Point3 apply(const RigidTransform& T, const Point3& p);
TimedPoint apply(const RigidTransform& T, const TimedPoint& pt);

// a_to <- b: compose(a, b) maps b.from all the way to a.to. Frame names must
// chain (a.from == b.to), otherwise throws ConfigError. The product rotation
// is re-orthonormalized when drift exceeds 1e-12.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& T);

bool is_orthonormal(const Eigen::Matrix3d& R, double tol = 1e-9);
// Nearest proper rotation in the Frobenius sense (SVD projection).
Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& R);

Eigen::Matrix3d rotation_z(double angle);
// Quaternion with non-negative scalar part; normalized.
Eigen::Quaterniond to_quaternion(const Eigen::Matrix3d& R);
Eigen::Matrix3d from_quaternion(double qw, double qx, double qy, double qz);
// Geodesic distance between two rotations, in radians.
double rotation_angle_between(const Eigen::Matrix3d& Ra,
                              const Eigen::Matrix3d& Rb);

struct TargetTrajectory {
  TargetId target;
  FrameId frame;
  std::vector<TimedPoint> samples;  // strictly increasing timestamps

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

// Builds a trajectory from possibly unordered input: samples whose timestamp
// does not strictly increase are dropped (count reported via dropped). Every
// sample must carry the trajectory frame.
TargetTrajectory make_trajectory(const TargetId& target, const FrameId& frame,
                                 const std::vector<TimedPoint>& points,
                                 std::size_t* dropped = nullptr);

TargetTrajectory transformed(const RigidTransform& T,
                             const TargetTrajectory& traj);

struct Pose {
  Timestamp t = 0.0;
  RigidTransform transform;    // body -> world
  double residual_rmse = 0.0;  // target fit residual, meters
  bool outlier = false;
};

}  // namespace gtruth
