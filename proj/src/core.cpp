#include "gtruth/core.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace gtruth {

std::string to_string(const TargetId& id) {
  const char* base = id.kind == TargetKind::prism ? "prism" : "gnss";
  return base + std::to_string(id.index);
}

RigidTransform RigidTransform::identity(FrameId frame) {
  RigidTransform T;
  T.from = frame;
  T.to = std::move(frame);
  return T;
}

Point3 apply(const RigidTransform& T, const Point3& p) {
  return T.rotation * p + T.translation;
}

TimedPoint apply(const RigidTransform& T, const TimedPoint& pt) {
  if (!pt.frame.empty() && !T.from.empty() && pt.frame != T.from)
    throw ConfigError("cannot apply transform " + T.from + "->" + T.to +
                      " to point in frame " + pt.frame);
  return TimedPoint{pt.t, apply(T, pt.p), T.to};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  if (!a.from.empty() && !b.to.empty() && a.from != b.to)
    throw ConfigError("frame mismatch composing " + a.from + "->" + a.to +
                      " with " + b.from + "->" + b.to);
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  out.from = b.from;
  out.to = a.to;
  const Eigen::Matrix3d drift =
      out.rotation.transpose() * out.rotation - Eigen::Matrix3d::Identity();
  if (drift.cwiseAbs().maxCoeff() > 1e-12)
    out.rotation = orthonormalized(out.rotation);
  return out;
}

RigidTransform inverse(const RigidTransform& T) {
  RigidTransform out;
  out.rotation = T.rotation.transpose();
  out.translation = -(out.rotation * T.translation);
  out.from = T.to;
  out.to = T.from;
  return out;
}

bool is_orthonormal(const Eigen::Matrix3d& R, double tol) {
  const Eigen::Matrix3d err =
      R.transpose() * R - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() <= tol && R.determinant() > 0.0;
}

Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& R) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(2) *= -1.0;
  return U * V.transpose();
}

Eigen::Matrix3d rotation_z(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

Eigen::Quaterniond to_quaternion(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

Eigen::Matrix3d from_quaternion(double qw, double qx, double qy, double qz) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw DataError("cannot normalize zero or non-finite quaternion");
  q.normalize();
  return q.toRotationMatrix();
}

double rotation_angle_between(const Eigen::Matrix3d& Ra,
                              const Eigen::Matrix3d& Rb) {
  const double c = ((Ra.transpose() * Rb).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

TargetTrajectory make_trajectory(const TargetId& target, const FrameId& frame,
                                 const std::vector<TimedPoint>& points,
                                 std::size_t* dropped) {
  TargetTrajectory traj;
  traj.target = target;
  traj.frame = frame;
  traj.samples.reserve(points.size());
  std::size_t rejected = 0;
  for (const TimedPoint& pt : points) {
    if (!pt.frame.empty() && pt.frame != frame)
      throw ConfigError("trajectory frame " + frame +
                        " does not match sample frame " + pt.frame);
    if (!traj.samples.empty() && !(pt.t > traj.samples.back().t)) {
      ++rejected;
      continue;
    }
    traj.samples.push_back(TimedPoint{pt.t, pt.p, frame});
  }
  if (dropped) *dropped = rejected;
  return traj;
}

TargetTrajectory transformed(const RigidTransform& T,
                             const TargetTrajectory& traj) {
  if (traj.frame != T.from)
    throw ConfigError("cannot transform trajectory in frame " + traj.frame +
                      " with " + T.from + "->" + T.to);
  TargetTrajectory out;
  out.target = traj.target;
  out.frame = T.to;
  out.samples.reserve(traj.samples.size());
  for (const TimedPoint& pt : traj.samples)
    out.samples.push_back(TimedPoint{pt.t, apply(T, pt.p), T.to});
  return out;
}

}  // namespace gtruth
