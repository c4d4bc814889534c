#include "gtruth/align.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace gtruth {

AlignmentResult estimate_rigid_transform(const Correspondences& c,
                                         const FrameId& from,
                                         const FrameId& to) {
  const std::size_t n = c.source.size();
  if (n != c.destination.size())
    throw ConfigError("correspondence length mismatch: " + std::to_string(n) +
                      " source vs " + std::to_string(c.destination.size()) +
                      " destination points");
  if (n < 3)
    throw DegeneracyError("rigid registration needs >= 3 correspondences, got " +
                          std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    if (!c.source[i].allFinite() || !c.destination[i].allFinite())
      throw DataError("non-finite correspondence at index " + std::to_string(i));

  Point3 cs = Point3::Zero(), cd = Point3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cs += c.source[i];
    cd += c.destination[i];
  }
  cs /= static_cast<double>(n);
  cd /= static_cast<double>(n);

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();    // source-destination
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();  // source self, for rank
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 s = c.source[i] - cs;
    const Point3 d = c.destination[i] - cd;
    cross += s * d.transpose();
    scatter += s * s.transpose();
  }

  // Singular values of the centered source are the roots of the scatter
  // eigenvalues. A centered set is rank <= 2 for n = 3, so collinearity is
  // decided by the second singular value.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  const Eigen::Vector3d sv = eig.eigenvalues()
                                 .cwiseMax(0.0)
                                 .cwiseSqrt();  // ascending order
  AlignmentResult result;
  result.conditioning = sv(2) > 0.0 ? sv(1) / sv(2) : 0.0;
  if (!(sv(1) > 1e-9 * sv(2)))
    throw DegeneracyError(
        "degenerate (collinear) source points, conditioning ratio " +
        std::to_string(result.conditioning));

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Vector3d diag = Eigen::Vector3d::Ones();
  if ((v * u.transpose()).determinant() < 0.0) diag(2) = -1.0;
  result.transform.rotation = v * diag.asDiagonal() * u.transpose();
  result.transform.translation = cd - result.transform.rotation * cs;
  result.transform.from = from;
  result.transform.to = to;

  result.per_point_residuals.resize(n);
  double sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r =
        (apply(result.transform, c.source[i]) - c.destination[i]).norm();
    result.per_point_residuals[i] = r;
    sumsq += r * r;
  }
  result.rmse = std::sqrt(sumsq / static_cast<double>(n));
  return result;
}

StationCalibration calibrate_station_pair(const std::vector<TimedPoint>& gcp_a,
                                          const std::vector<TimedPoint>& gcp_b) {
  if (gcp_a.size() != gcp_b.size())
    throw ConfigError("GCP list length mismatch: " +
                      std::to_string(gcp_a.size()) + " vs " +
                      std::to_string(gcp_b.size()));
  Correspondences c;
  c.source.reserve(gcp_b.size());
  c.destination.reserve(gcp_a.size());
  for (const TimedPoint& pt : gcp_b) c.source.push_back(pt.p);
  for (const TimedPoint& pt : gcp_a) c.destination.push_back(pt.p);

  const FrameId from = gcp_b.empty() ? FrameId{} : gcp_b.front().frame;
  const FrameId to = gcp_a.empty() ? FrameId{} : gcp_a.front().frame;

  StationCalibration calib;
  calib.gcp_count = gcp_a.size();
  if (calib.gcp_count < 8 || calib.gcp_count > 12)
    calib.warning = "GCP count " + std::to_string(calib.gcp_count) +
                    " outside the advised 8..12 range";
  calib.alignment = estimate_rigid_transform(c, from, to);
  return calib;
}

}  // namespace gtruth
