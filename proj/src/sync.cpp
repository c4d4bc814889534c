#include "gtruth/sync.hpp"

#include <algorithm>
#include <cmath>

namespace gtruth {

void SyncPolicy::validate() const {
  if (!(max_gap > 0.0) || !std::isfinite(max_gap))
    throw ConfigError("SyncPolicy.max_gap must be > 0");
  if (reference == SyncReference::union_grid &&
      (!(grid_step > 0.0) || !std::isfinite(grid_step)))
    throw ConfigError("SyncPolicy.grid_step must be > 0");
}

const Point3& SyncTriplet::point(int index) const {
  switch (index) {
    case 0: return p0;
    case 1: return p1;
    case 2: return p2;
  }
  throw ConfigError("triplet point index must be 0..2");
}

InterpStatus try_interpolate_at(const TargetTrajectory& traj, Timestamp t,
                                const SyncPolicy& policy, Point3& out) {
  const auto& samples = traj.samples;
  if (samples.size() < 2) return InterpStatus::out_of_range;
  if (t < samples.front().t || t > samples.back().t)
    return InterpStatus::out_of_range;

  const auto hi = std::lower_bound(
      samples.begin(), samples.end(), t,
      [](const TimedPoint& s, Timestamp value) { return s.t < value; });
  if (hi->t == t) {  // exact sample, no interpolation
    out = hi->p;
    return InterpStatus::ok;
  }
  const auto lo = hi - 1;
  if (hi->t - lo->t > policy.max_gap) return InterpStatus::gap_exceeded;
  const double u = (t - lo->t) / (hi->t - lo->t);
  out = (1.0 - u) * lo->p + u * hi->p;
  return InterpStatus::ok;
}

Point3 interpolate_at(const TargetTrajectory& traj, Timestamp t,
                      const SyncPolicy& policy) {
  Point3 out;
  switch (try_interpolate_at(traj, t, policy, out)) {
    case InterpStatus::ok: return out;
    case InterpStatus::out_of_range:
      throw DataError("interpolation refused: t outside trajectory range");
    case InterpStatus::gap_exceeded:
      throw DataError("interpolation refused: bracketing gap exceeds max_gap");
  }
  throw DataError("unreachable interpolation status");
}

std::vector<SyncTriplet> form_triplets(const TargetTrajectory& t0,
                                       const TargetTrajectory& t1,
                                       const TargetTrajectory& t2,
                                       const SyncPolicy& policy) {
  policy.validate();
  const TargetTrajectory* streams[3] = {&t0, &t1, &t2};
  for (int i = 0; i < 3; ++i) {
    if (streams[i]->samples.size() < 2)
      throw DataError("stream " + std::to_string(i) + " has " +
                      std::to_string(streams[i]->samples.size()) +
                      " samples, need >= 2");
    if (streams[i]->frame != t0.frame)
      throw ConfigError("streams must share one frame: '" + t0.frame +
                        "' vs '" + streams[i]->frame + "'");
    if (streams[i]->target.index != i)
      throw ConfigError("stream " + std::to_string(i) +
                        " carries target index " +
                        std::to_string(streams[i]->target.index));
  }

  std::vector<Timestamp> reference;
  if (policy.reference == SyncReference::stream0_timestamps) {
    reference.reserve(t0.samples.size());
    for (const TimedPoint& s : t0.samples) reference.push_back(s.t);
  } else {
    // Regular grid anchored at the start of the three-stream overlap.
    Timestamp start = t0.samples.front().t, end = t0.samples.back().t;
    for (int i = 1; i < 3; ++i) {
      start = std::max(start, streams[i]->samples.front().t);
      end = std::min(end, streams[i]->samples.back().t);
    }
    for (Timestamp t = start; t <= end;
         t = start + policy.grid_step * static_cast<double>(reference.size()))
      reference.push_back(t);
  }

  std::vector<SyncTriplet> out;
  out.reserve(reference.size());
  for (const Timestamp t : reference) {
    SyncTriplet triplet;
    triplet.t = t;
    Point3* points[3] = {&triplet.p0, &triplet.p1, &triplet.p2};
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i)
      ok = try_interpolate_at(*streams[i], t, policy, *points[i]) ==
           InterpStatus::ok;
    if (ok) out.push_back(triplet);
  }
  return out;
}

TargetTrajectory speed_gate(const TargetTrajectory& traj, double max_speed,
                            std::size_t* dropped) {
  if (!(max_speed > 0.0)) throw ConfigError("max_speed must be > 0");
  TargetTrajectory out;
  out.target = traj.target;
  out.frame = traj.frame;
  out.samples.reserve(traj.samples.size());
  std::size_t rejected = 0;
  for (const TimedPoint& s : traj.samples) {
    if (!out.samples.empty()) {
      const TimedPoint& prev = out.samples.back();
      const double dt = s.t - prev.t;
      if (dt > 0.0 && (s.p - prev.p).norm() > max_speed * dt) {
        ++rejected;
        continue;
      }
    }
    out.samples.push_back(s);
  }
  if (dropped) *dropped = rejected;
  return out;
}

}  // namespace gtruth
