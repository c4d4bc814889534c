// Python bindings: the computational kernels plus the five pipeline
// commands. Points cross the boundary as plain 3-sequences, matrices as
// nested lists, results as dicts, so the module has no numpy requirement.

#include "gtruth/align.hpp"
#include "gtruth/ingest.hpp"
#include "gtruth/metrics.hpp"
#include "gtruth/pose.hpp"
#include "gtruth/sync.hpp"
#include "gtruth/workspace.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace py = pybind11;
using namespace gtruth;

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

using Vec3 = std::array<double, 3>;

Point3 to_point(const Vec3& v) { return Point3(v[0], v[1], v[2]); }

std::vector<Point3> to_points(const std::vector<Vec3>& vs) {
  std::vector<Point3> out;
  out.reserve(vs.size());
  for (const Vec3& v : vs) out.push_back(to_point(v));
  return out;
}

py::tuple from_point(const Point3& p) { return py::make_tuple(p.x(), p.y(), p.z()); }

py::list from_matrix(const Eigen::Matrix3d& R) {
  py::list rows;
  for (int i = 0; i < 3; ++i) {
    py::list row;
    for (int j = 0; j < 3; ++j) row.append(R(i, j));
    rows.append(row);
  }
  return rows;
}

TargetKind kind_from_string(const std::string& kind) {
  if (kind == "prism") return TargetKind::prism;
  if (kind == "gnss") return TargetKind::gnss_antenna;
  throw ConfigError("unknown target kind '" + kind + "' (prism|gnss)");
}

BodyCalibration make_body(const std::string& kind, const Vec3& b0,
                          const Vec3& b1, const Vec3& b2) {
  return BodyCalibration::from_points(kind_from_string(kind), to_point(b0),
                                      to_point(b1), to_point(b2));
}

GeodeticOrigin make_origin(double lat_deg, double lon_deg, double height) {
  return GeodeticOrigin{lat_deg * kDegree, lon_deg * kDegree, height};
}

using PyRecord = std::tuple<double, double, double, double>;  // t, e01, e02, e12

std::vector<InterDistanceRecord> to_records(const std::vector<PyRecord>& rows) {
  std::vector<InterDistanceRecord> out;
  out.reserve(rows.size());
  for (const auto& [t, e01, e02, e12] : rows)
    out.push_back({t, e01, e02, e12});
  return out;
}

py::dict summary_dict(const MetricSummary& s) {
  py::dict d;
  d["median"] = s.median;
  d["iqr"] = s.iqr;
  d["q1"] = s.q1;
  d["q3"] = s.q3;
  d["count"] = s.count;
  return d;
}

PipelineOptions make_options(double max_gap, const std::string& reference,
                             double grid_step, bool admit_float,
                             double max_speed, double reject_threshold,
                             bool exclude_outliers, double radius,
                             const std::string& match_anchor) {
  PipelineOptions opt;
  opt.sync.max_gap = max_gap;
  if (reference == "stream0")
    opt.sync.reference = SyncReference::stream0_timestamps;
  else if (reference == "grid")
    opt.sync.reference = SyncReference::union_grid;
  else
    throw ConfigError("reference must be 'stream0' or 'grid'");
  opt.sync.grid_step = grid_step;
  opt.admit_float = admit_float;
  opt.max_speed = max_speed;
  opt.reject_threshold = reject_threshold;
  opt.exclude_outliers = exclude_outliers;
  opt.radius = radius;
  if (match_anchor == "target0")
    opt.match_anchor = MatchAnchorKind::target0;
  else if (match_anchor == "centroid")
    opt.match_anchor = MatchAnchorKind::centroid;
  else
    throw ConfigError("match_anchor must be 'target0' or 'centroid'");
  return opt;
}

}  // namespace

PYBIND11_MODULE(_gtruth, m) {
  m.doc() = "Multi-instrument ground-truth trajectory toolkit";
  m.attr("__version__") = std::string(kToolVersion);

  static py::exception<Error> exc_error(m, "Error");
  static py::exception<ConfigError> exc_config(m, "ConfigError", exc_error);
  static py::exception<DataError> exc_data(m, "DataError", exc_error);
  static py::exception<DegeneracyError> exc_degeneracy(m, "DegeneracyError",
                                                       exc_error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(exc_config.ptr(), e.what());
    } catch (const DataError& e) {
      PyErr_SetString(exc_data.ptr(), e.what());
    } catch (const DegeneracyError& e) {
      PyErr_SetString(exc_degeneracy.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(exc_error.ptr(), e.what());
    }
  });

  m.def(
      "estimate_rigid_transform",
      [](const std::vector<Vec3>& source, const std::vector<Vec3>& destination) {
        Correspondences c{to_points(source), to_points(destination)};
        const AlignmentResult res = estimate_rigid_transform(c);
        py::dict d;
        d["rotation"] = from_matrix(res.transform.rotation);
        d["translation"] = from_point(res.transform.translation);
        d["rmse"] = res.rmse;
        d["conditioning"] = res.conditioning;
        d["residuals"] = res.per_point_residuals;
        return d;
      },
      py::arg("source"), py::arg("destination"),
      "Least-squares rigid registration mapping source onto destination.");

  m.def(
      "rts_to_cartesian",
      [](double azimuth, double elevation, double slant_distance) {
        RtsObservation obs;
        obs.azimuth = azimuth;
        obs.elevation = elevation;
        obs.slant_distance = slant_distance;
        return from_point(rts_to_cartesian(obs).p);
      },
      py::arg("azimuth"), py::arg("elevation"), py::arg("slant_distance"),
      "Polar RTS reading (radians, meters) to station-frame xyz.");

  m.def(
      "geodetic_to_enu",
      [](double lat_deg, double lon_deg, double height, double origin_lat_deg,
         double origin_lon_deg, double origin_height) {
        GnssFix fix;
        fix.latitude = lat_deg * kDegree;
        fix.longitude = lon_deg * kDegree;
        fix.ellipsoidal_height = height;
        const TimedPoint p = geodetic_to_enu(
            fix, make_origin(origin_lat_deg, origin_lon_deg, origin_height));
        return from_point(p.p);
      },
      py::arg("lat_deg"), py::arg("lon_deg"), py::arg("height"),
      py::arg("origin_lat_deg"), py::arg("origin_lon_deg"),
      py::arg("origin_height"),
      "WGS-84 geodetic coordinates to local east/north/up at the origin.");

  m.def(
      "enu_to_geodetic",
      [](const Vec3& enu, double origin_lat_deg, double origin_lon_deg,
         double origin_height) {
        const Eigen::Vector3d g = enu_to_geodetic(
            to_point(enu),
            make_origin(origin_lat_deg, origin_lon_deg, origin_height));
        return py::make_tuple(g.x() / kDegree, g.y() / kDegree, g.z());
      },
      py::arg("enu"), py::arg("origin_lat_deg"), py::arg("origin_lon_deg"),
      py::arg("origin_height"),
      "Inverse of geodetic_to_enu; returns (lat_deg, lon_deg, height).");

  m.def(
      "reconstruct_pose",
      [](double t, const Vec3& p0, const Vec3& p1, const Vec3& p2,
         const std::string& body_kind, const Vec3& b0, const Vec3& b1,
         const Vec3& b2, double reject_threshold) {
        SyncTriplet tr;
        tr.t = t;
        tr.p0 = to_point(p0);
        tr.p1 = to_point(p1);
        tr.p2 = to_point(p2);
        const Pose pose =
            reconstruct_pose(tr, make_body(body_kind, b0, b1, b2), "world",
                             reject_threshold);
        py::dict d;
        d["t"] = pose.t;
        d["rotation"] = from_matrix(pose.transform.rotation);
        d["translation"] = from_point(pose.transform.translation);
        d["residual_rmse"] = pose.residual_rmse;
        d["outlier"] = pose.outlier;
        return d;
      },
      py::arg("t"), py::arg("p0"), py::arg("p1"), py::arg("p2"),
      py::arg("body_kind"), py::arg("b0"), py::arg("b1"), py::arg("b2"),
      py::arg("reject_threshold") = kDefaultRejectThreshold,
      "6-DOF pose from one synchronous target triplet (body -> world).");

  m.def(
      "inter_distance_errors",
      [](const std::vector<std::tuple<double, Vec3, Vec3, Vec3>>& triplets,
         const std::string& body_kind, const Vec3& b0, const Vec3& b1,
         const Vec3& b2) {
        std::vector<SyncTriplet> trs;
        trs.reserve(triplets.size());
        for (const auto& [t, p0, p1, p2] : triplets) {
          SyncTriplet tr;
          tr.t = t;
          tr.p0 = to_point(p0);
          tr.p1 = to_point(p1);
          tr.p2 = to_point(p2);
          trs.push_back(tr);
        }
        const auto records =
            inter_distance_errors(trs, make_body(body_kind, b0, b1, b2));
        std::vector<PyRecord> out;
        out.reserve(records.size());
        for (const auto& r : records) out.emplace_back(r.t, r.e01, r.e02, r.e12);
        return out;
      },
      py::arg("triplets"), py::arg("body_kind"), py::arg("b0"), py::arg("b1"),
      py::arg("b2"),
      "Signed measured-minus-calibrated pairwise distance errors, "
      "(t, e01, e02, e12) per triplet.");

  m.def(
      "nn_match",
      [](const std::vector<Vec3>& a, const std::vector<Vec3>& b,
         double radius) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const MatchPair& mp : nn_match(to_points(a), to_points(b), radius))
          out.emplace_back(mp.index_a, mp.index_b, mp.separation);
        return out;
      },
      py::arg("positions_a"), py::arg("positions_b"),
      py::arg("radius") = kDefaultMatchRadius,
      "Nearest neighbor in B within radius for each point of A; "
      "(index_a, index_b, separation) tuples.");

  m.def(
      "inter_experiment_errors",
      [](const std::vector<PyRecord>& records_a,
         const std::vector<PyRecord>& records_b,
         const std::vector<std::tuple<std::size_t, std::size_t, double>>&
             matches) {
        std::vector<MatchPair> mps;
        mps.reserve(matches.size());
        for (const auto& [ia, ib, sep] : matches) mps.push_back({ia, ib, sep});
        return inter_experiment_errors(to_records(records_a),
                                       to_records(records_b), mps);
      },
      py::arg("records_a"), py::arg("records_b"), py::arg("matches"),
      "Per-match disparities e_ij(A) - e_ij(B), flattened pair-major.");

  m.def(
      "summarize",
      [](const std::vector<double>& errors) {
        return summary_dict(summarize(errors));
      },
      py::arg("errors"),
      "Median/quartile summary of |errors| (type-7 quantiles).");

  m.def(
      "quantile",
      [](std::vector<double> values, double p) {
        std::sort(values.begin(), values.end());
        return quantile_sorted(values, p);
      },
      py::arg("values"), py::arg("p"),
      "Type-7 quantile of the raw values (sorted internally).");

  // pipeline commands, mirroring the gtruth executable
  m.def(
      "synth",
      [](const std::string& spec_file, const std::string& workspace,
         std::optional<std::uint64_t> seed) {
        cmd_synth(spec_file, workspace, seed);
      },
      py::arg("spec_file"), py::arg("workspace"),
      py::arg("seed") = std::nullopt,
      "Generate a synthetic experiment bundle and register it.");

  m.def(
      "calibrate",
      [](const std::string& workspace, const std::string& experiment) {
        cmd_calibrate(workspace, experiment);
      },
      py::arg("workspace"), py::arg("experiment"),
      "Register stations from shared GCPs; writes derived/calibration.json.");

  m.def(
      "reconstruct",
      [](const std::string& workspace, const std::string& experiment,
         const std::string& system, double max_gap,
         const std::string& reference, double grid_step, bool admit_float,
         double max_speed, double reject_threshold) {
        cmd_reconstruct(workspace, experiment, system_from_string(system),
                        make_options(max_gap, reference, grid_step,
                                     admit_float, max_speed, reject_threshold,
                                     false, kDefaultMatchRadius, "target0"));
      },
      py::arg("workspace"), py::arg("experiment"), py::arg("system"),
      py::arg("max_gap") = 1.0, py::arg("reference") = "stream0",
      py::arg("grid_step") = 0.4, py::arg("admit_float") = false,
      py::arg("max_speed") = 5.0,
      py::arg("reject_threshold") = kDefaultRejectThreshold,
      "Synchronize three target streams and fit the 6-DOF trajectory.");

  m.def(
      "evaluate",
      [](const std::string& workspace, const std::string& experiment,
         bool exclude_outliers, double reject_threshold) {
        PipelineOptions opt;
        opt.exclude_outliers = exclude_outliers;
        opt.reject_threshold = reject_threshold;
        cmd_evaluate(workspace, experiment, opt);
      },
      py::arg("workspace"), py::arg("experiment"),
      py::arg("exclude_outliers") = false,
      py::arg("reject_threshold") = kDefaultRejectThreshold,
      "Intra-experiment inter-distance report (reports/report.json).");

  m.def(
      "compare",
      [](const std::string& workspace, const std::string& experiment_a,
         const std::string& experiment_b, double radius,
         const std::string& match_anchor, bool exclude_outliers,
         double reject_threshold) {
        PipelineOptions opt;
        opt.radius = radius;
        opt.exclude_outliers = exclude_outliers;
        opt.reject_threshold = reject_threshold;
        opt.match_anchor = match_anchor == "centroid"
                               ? MatchAnchorKind::centroid
                               : MatchAnchorKind::target0;
        if (match_anchor != "target0" && match_anchor != "centroid")
          throw ConfigError("match_anchor must be 'target0' or 'centroid'");
        cmd_compare(workspace, experiment_a, experiment_b, opt);
      },
      py::arg("workspace"), py::arg("experiment_a"), py::arg("experiment_b"),
      py::arg("radius") = kDefaultMatchRadius,
      py::arg("match_anchor") = "target0",
      py::arg("exclude_outliers") = false,
      py::arg("reject_threshold") = kDefaultRejectThreshold,
      "Inter-experiment reproducibility report for spatially matched poses.");
}
