#pragma once

#include "gtruth/core.hpp"

#include <optional>

namespace gtruth {

struct Correspondences {
  std::vector<Point3> source;
  std::vector<Point3> destination;  // same length, same point order
};

struct AlignmentResult {
  RigidTransform transform;  // maps source coordinates into destination
  double rmse = 0.0;
  std::vector<double> per_point_residuals;
  // Ratio of the second-largest to largest singular value of the centered
  // source (collinearity measure); reported alongside degeneracy errors.
  double conditioning = 0.0;
};

// Closed-form least-squares rigid registration: SVD of the cross-covariance
// with the determinant-correction step, scale fixed to 1, equal weights.
// Throws DegeneracyError when n < 3 or the source points are (near-)collinear
// (second singular value <= 1e-9 x largest).
AlignmentResult estimate_rigid_transform(const Correspondences& c,
                                         const FrameId& from = "source",
                                         const FrameId& to = "destination");

struct StationCalibration {
  AlignmentResult alignment;  // station-b coordinates -> station-a
  std::size_t gcp_count = 0;
  std::optional<std::string> warning;  // GCP count outside the advised 8..12
};

// Registers the same physical ground control points as seen from two
// stations; lists must be index-aligned. Throws ConfigError on length
// mismatch, DegeneracyError as above.
StationCalibration calibrate_station_pair(const std::vector<TimedPoint>& gcp_a,
                                          const std::vector<TimedPoint>& gcp_b);

}  // namespace gtruth
