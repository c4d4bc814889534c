#include "gtruth/pose.hpp"

#include "gtruth/align.hpp"
#include "gtruth/csvio.hpp"

#include <istream>
#include <ostream>

namespace gtruth {

BodyCalibration BodyCalibration::from_points(TargetKind kind, const Point3& b0,
                                             const Point3& b1,
                                             const Point3& b2) {
  BodyCalibration calib;
  calib.kind = kind;
  calib.points = {b0, b1, b2};
  for (const Point3& p : calib.points)
    if (!p.allFinite()) throw DataError("non-finite body calibration point");
  if (!(calib.triangle_area() > 1e-6))
    throw DegeneracyError(
        "body calibration targets are (near-)collinear: triangle area " +
        std::to_string(calib.triangle_area()) + " m^2 <= 1e-6 m^2");
  calib.d01 = (b1 - b0).norm();
  calib.d02 = (b2 - b0).norm();
  calib.d12 = (b2 - b1).norm();
  return calib;
}

double BodyCalibration::triangle_area() const {
  return 0.5 *
         (points[1] - points[0]).cross(points[2] - points[0]).norm();
}

double BodyCalibration::pair_distance(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == 0 && j == 1) return d01;
  if (i == 0 && j == 2) return d02;
  if (i == 1 && j == 2) return d12;
  throw ConfigError("pair_distance indices must be distinct and in 0..2");
}

BodyCalibration load_body_calibration(std::istream& in) {
  const csv::Table table = csv::read_table(in, "target,x,y,z", "body calibration");
  if (table.rows.size() != 3)
    throw ConfigError("body calibration: expected 3 target rows, got " +
                      std::to_string(table.rows.size()));

  std::array<Point3, 3> points{};
  std::array<bool, 3> seen{};
  TargetKind kind = TargetKind::prism;
  bool kind_set = false;
  for (const csv::Row& row : table.rows) {
    const auto fields = csv::split_fields(row.text);
    double xyz[3];
    if (fields.size() != 4 || !csv::parse_double(fields[1], xyz[0]) ||
        !csv::parse_double(fields[2], xyz[1]) ||
        !csv::parse_double(fields[3], xyz[2]))
      throw ConfigError("body calibration: malformed row at line " +
                        std::to_string(row.line_number));
    const std::string_view name = fields[0];
    TargetKind row_kind;
    int index = -1;
    if (name.size() == 6 && name.starts_with("prism")) {
      row_kind = TargetKind::prism;
      index = name.back() - '0';
    } else if (name.size() == 5 && name.starts_with("gnss")) {
      row_kind = TargetKind::gnss_antenna;
      index = name.back() - '0';
    } else {
      throw ConfigError("body calibration: bad target name '" +
                        std::string(name) + "' at line " +
                        std::to_string(row.line_number));
    }
    if (index < 0 || index > 2)
      throw ConfigError("body calibration: target index out of range at line " +
                        std::to_string(row.line_number));
    if (kind_set && row_kind != kind)
      throw ConfigError("body calibration: mixed target kinds");
    kind = row_kind;
    kind_set = true;
    if (seen[index])
      throw ConfigError("body calibration: duplicate target index " +
                        std::to_string(index));
    seen[index] = true;
    points[index] = Point3(xyz[0], xyz[1], xyz[2]);
  }
  return BodyCalibration::from_points(kind, points[0], points[1], points[2]);
}

void write_body_calibration(std::ostream& out, const BodyCalibration& calib) {
  out << "target,x,y,z\n";
  for (int i = 0; i < 3; ++i) {
    out << to_string(TargetId{calib.kind, i});
    for (int c = 0; c < 3; ++c) out << ',' << csv::format_double(calib.points[i](c));
    out << '\n';
  }
}

Pose reconstruct_pose(const SyncTriplet& triplet, const BodyCalibration& calib,
                      const FrameId& world, double reject_threshold) {
  // Fit measured -> body and invert: the rigid least-squares optimum is the
  // exact inverse of the body -> world optimum, and this direction puts the
  // collinearity check on the measured triplet (the body triangle is already
  // validated at construction).
  Correspondences c;
  c.source = {triplet.p0, triplet.p1, triplet.p2};
  c.destination = {calib.points[0], calib.points[1], calib.points[2]};
  const AlignmentResult fit = estimate_rigid_transform(c, world, kBodyFrame);

  Pose pose;
  pose.t = triplet.t;
  pose.transform = inverse(fit.transform);
  pose.residual_rmse = fit.rmse;
  pose.outlier = fit.rmse > reject_threshold;
  return pose;
}

Reconstruction reconstruct_trajectory(const std::vector<SyncTriplet>& triplets,
                                      const BodyCalibration& calib,
                                      const FrameId& world,
                                      double reject_threshold) {
  Reconstruction out;
  out.poses.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    try {
      Pose pose = reconstruct_pose(triplets[i], calib, world, reject_threshold);
      if (pose.outlier) ++out.outlier_count;
      out.poses.push_back(std::move(pose));
    } catch (const Error& e) {
      out.issues.push_back(ReconstructionIssue{i, e.what()});
    }
  }
  return out;
}

}  // namespace gtruth
