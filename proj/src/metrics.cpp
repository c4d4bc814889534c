#include "gtruth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace gtruth {

double InterDistanceRecord::pair(int k) const {
  switch (k) {
    case 0: return e01;
    case 1: return e02;
    case 2: return e12;
  }
  throw ConfigError("pair index must be 0..2");
}

std::vector<InterDistanceRecord> inter_distance_errors(
    const std::vector<SyncTriplet>& triplets, const BodyCalibration& calib) {
  std::vector<InterDistanceRecord> out;
  out.reserve(triplets.size());
  for (const SyncTriplet& tr : triplets) {
    InterDistanceRecord rec;
    rec.t = tr.t;
    rec.e01 = (tr.p0 - tr.p1).norm() - calib.d01;
    rec.e02 = (tr.p0 - tr.p2).norm() - calib.d02;
    rec.e12 = (tr.p1 - tr.p2).norm() - calib.d12;
    out.push_back(rec);
  }
  return out;
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t v : {static_cast<std::uint64_t>(c.x),
                            static_cast<std::uint64_t>(c.y),
                            static_cast<std::uint64_t>(c.z)}) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

CellKey cell_of(const Point3& p, double radius) {
  return CellKey{static_cast<std::int64_t>(std::floor(p.x() / radius)),
                 static_cast<std::int64_t>(std::floor(p.y() / radius)),
                 static_cast<std::int64_t>(std::floor(p.z() / radius))};
}

}  // namespace

std::vector<MatchPair> nn_match(const std::vector<Point3>& positions_a,
                                const std::vector<Point3>& positions_b,
                                double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ConfigError("nn_match radius must be > 0");
  std::vector<MatchPair> out;
  if (positions_a.empty() || positions_b.empty()) return out;

  // Uniform grid with cell edge = radius: every candidate within the radius
  // of a query lies in the 27 surrounding cells. The final selection is by
  // exact squared distance, so the result equals exhaustive search.
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
  grid.reserve(positions_b.size());
  for (std::size_t i = 0; i < positions_b.size(); ++i)
    grid[cell_of(positions_b[i], radius)].push_back(i);

  const double radius_sq = radius * radius;
  for (std::size_t ia = 0; ia < positions_a.size(); ++ia) {
    const Point3& pa = positions_a[ia];
    const CellKey center = cell_of(pa, radius);
    double best_sq = std::numeric_limits<double>::infinity();
    std::size_t best_ib = 0;
    bool found = false;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it =
              grid.find(CellKey{center.x + dx, center.y + dy, center.z + dz});
          if (it == grid.end()) continue;
          for (const std::size_t ib : it->second) {
            const double d_sq = (positions_b[ib] - pa).squaredNorm();
            if (d_sq > radius_sq) continue;
            // Deterministic tie-break: lowest index_b at equal distance.
            if (!found || d_sq < best_sq ||
                (d_sq == best_sq && ib < best_ib)) {
              best_sq = d_sq;
              best_ib = ib;
              found = true;
            }
          }
        }
    if (found)
      out.push_back(MatchPair{ia, best_ib, std::sqrt(best_sq)});
  }
  return out;  // already sorted by index_a (iteration order)
}

std::vector<double> inter_experiment_errors(
    const std::vector<InterDistanceRecord>& records_a,
    const std::vector<InterDistanceRecord>& records_b,
    const std::vector<MatchPair>& matches) {
  std::vector<double> out;
  out.reserve(matches.size() * 3);
  for (const MatchPair& m : matches) {
    if (m.index_a >= records_a.size() || m.index_b >= records_b.size())
      throw ConfigError("match indexes records out of range: (" +
                        std::to_string(m.index_a) + ", " +
                        std::to_string(m.index_b) + ")");
    const InterDistanceRecord& a = records_a[m.index_a];
    const InterDistanceRecord& b = records_b[m.index_b];
    out.push_back(a.e01 - b.e01);
    out.push_back(a.e02 - b.e02);
    out.push_back(a.e12 - b.e12);
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile p must be in [0,1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

MetricSummary summarize(const std::vector<double>& errors) {
  if (errors.empty()) throw DataError("summarize needs a non-empty error list");
  std::vector<double> abs_sorted;
  abs_sorted.reserve(errors.size());
  for (const double e : errors) {
    if (!std::isfinite(e)) throw DataError("summarize got a non-finite error");
    abs_sorted.push_back(std::abs(e));
  }
  std::sort(abs_sorted.begin(), abs_sorted.end());

  MetricSummary s;
  s.count = abs_sorted.size();
  s.q1 = quantile_sorted(abs_sorted, 0.25);
  s.median = quantile_sorted(abs_sorted, 0.5);
  s.q3 = quantile_sorted(abs_sorted, 0.75);
  s.iqr = s.q3 - s.q1;
  return s;
}

}  // namespace gtruth
