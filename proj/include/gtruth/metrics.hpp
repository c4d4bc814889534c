#pragma once

#include "gtruth/core.hpp"
#include "gtruth/pose.hpp"
#include "gtruth/sync.hpp"

namespace gtruth {

// Signed per-pair inter-distance errors at one timestamp: measured pairwise
// target distance minus the calibrated distance.
struct InterDistanceRecord {
  Timestamp t = 0.0;
  double e01 = 0.0, e02 = 0.0, e12 = 0.0;

  double pair(int k) const;  // k = 0 -> e01, 1 -> e02, 2 -> e12
};

struct MatchPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double separation = 0.0;  // <= the matching radius
};

struct MetricSummary {
  double median = 0.0;
  double iqr = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t count = 0;
};

inline constexpr double kDefaultMatchRadius = 2.0;  // m

std::vector<InterDistanceRecord> inter_distance_errors(
    const std::vector<SyncTriplet>& triplets, const BodyCalibration& calib);

// For each point of A, its single nearest neighbor in B when the separation
// is <= radius. Backed by a uniform grid (cell = radius) but guaranteed to
// equal exhaustive search; ties broken by lowest index_b. Output is sorted
// by index_a.
std::vector<MatchPair> nn_match(const std::vector<Point3>& positions_a,
                                const std::vector<Point3>& positions_b,
                                double radius = kDefaultMatchRadius);

// Disparities e_ij(A) - e_ij(B) for every match, flattened in
// (e01, e02, e12) order.
std::vector<double> inter_experiment_errors(
    const std::vector<InterDistanceRecord>& records_a,
    const std::vector<InterDistanceRecord>& records_b,
    const std::vector<MatchPair>& matches);

// Median/quartiles of |errors| with the type-7 (linear interpolation between
// closest order statistics) quantile convention.
MetricSummary summarize(const std::vector<double>& errors);

// Type-7 quantile of an already sorted, non-empty sample.
double quantile_sorted(const std::vector<double>& sorted, double p);

}  // namespace gtruth
