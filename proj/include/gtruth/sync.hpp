#pragma once

#include "gtruth/core.hpp"

namespace gtruth {

enum class SyncReference { stream0_timestamps, union_grid };

struct SyncPolicy {
  double max_gap = 1.0;  // seconds; largest bracketing gap allowed
  SyncReference reference = SyncReference::stream0_timestamps;
  double grid_step = 0.4;  // used only with union_grid

  void validate() const;
};

struct SyncTriplet {
  Timestamp t = 0.0;
  Point3 p0 = Point3::Zero();
  Point3 p1 = Point3::Zero();
  Point3 p2 = Point3::Zero();

  const Point3& point(int index) const;
  Point3 centroid() const { return (p0 + p1 + p2) / 3.0; }
};

enum class InterpStatus { ok, out_of_range, gap_exceeded };

// Linear interpolation at t between the bracketing samples; exact sample
// times short-circuit to the stored point. Refuses extrapolation and
// bracketing gaps larger than policy.max_gap.
InterpStatus try_interpolate_at(const TargetTrajectory& traj, Timestamp t,
                                const SyncPolicy& policy, Point3& out);
Point3 interpolate_at(const TargetTrajectory& traj, Timestamp t,
                      const SyncPolicy& policy);  // throws DataError

// For each reference timestamp (stream 0's samples, or a regular grid over
// the three-stream overlap), interpolates every stream; timestamps where any
// stream fails are omitted. Streams must share one frame and carry target
// indices 0, 1, 2.
std::vector<SyncTriplet> form_triplets(const TargetTrajectory& t0,
                                       const TargetTrajectory& t1,
                                       const TargetTrajectory& t2,
                                       const SyncPolicy& policy);

// Physical-plausibility gate: drops samples whose implied speed from the
// last kept sample exceeds max_speed (m/s).
TargetTrajectory speed_gate(const TargetTrajectory& traj,
                            double max_speed = 5.0,
                            std::size_t* dropped = nullptr);

}  // namespace gtruth
