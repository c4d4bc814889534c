#pragma once

#include "gtruth/core.hpp"
#include "gtruth/sync.hpp"

#include <array>
#include <iosfwd>

namespace gtruth {

// Lab-measured body-frame positions of the three targets of one system.
struct BodyCalibration {
  TargetKind kind = TargetKind::prism;
  std::array<Point3, 3> points{};         // b0, b1, b2
  double d01 = 0.0, d02 = 0.0, d12 = 0.0;  // derived pairwise distances

  // Validates non-collinearity (triangle area > 1e-6 m^2) and derives the
  // pairwise distances.
  static BodyCalibration from_points(TargetKind kind, const Point3& b0,
                                     const Point3& b1, const Point3& b2);

  double pair_distance(int i, int j) const;
  double triangle_area() const;
};

// CSV with header "target,x,y,z" and rows prism<k> or gnss<k>, k = 0..2.
BodyCalibration load_body_calibration(std::istream& in);
void write_body_calibration(std::ostream& out, const BodyCalibration& calib);

inline constexpr double kDefaultRejectThreshold = 0.05;  // m, residual gate
inline const FrameId kBodyFrame = "body";

// Rigid fit of the calibrated target triangle onto the measured triplet.
// Residuals above reject_threshold flag the pose as outlier (kept, marked).
Pose reconstruct_pose(const SyncTriplet& triplet, const BodyCalibration& calib,
                      const FrameId& world,
                      double reject_threshold = kDefaultRejectThreshold);

struct ReconstructionIssue {
  std::size_t index = 0;  // triplet position
  std::string reason;
};

struct Reconstruction {
  std::vector<Pose> poses;               // timestamp order preserved
  std::vector<ReconstructionIssue> issues;  // per-element failures, non-fatal
  std::size_t outlier_count = 0;
};

Reconstruction reconstruct_trajectory(
    const std::vector<SyncTriplet>& triplets, const BodyCalibration& calib,
    const FrameId& world,
    double reject_threshold = kDefaultRejectThreshold);

}  // namespace gtruth
