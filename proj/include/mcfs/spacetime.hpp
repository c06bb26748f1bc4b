#pragma once

#include <optional>
#include <vector>

#include "mcfs/profile.hpp"
#include "mcfs/surgery.hpp"

namespace mcfs {

enum class Provenance { SurgeryFlow, LevelSet, Shifted };
enum class TrackClosure { Open, Extinct, Horizon };

// One stored time slice: profile components for flow tracks, raw boundary
// crossing points for level-set tracks.
struct TrackSlice {
  double time = 0.0;
  std::optional<DomainSlice> profile;
  std::vector<Vec2> contour;
  int component_count = 0;

  bool empty() const { return component_count == 0; }
  // Boundary point samples with arc gaps <= max_gap (profile slices are
  // supersampled; contour points are already grid-dense).
  std::vector<Vec2> cloud(double max_gap) const;
};

// Discrete space-time track: the union over recorded times of slice x {t}.
struct SpaceTimeTrack {
  Provenance provenance = Provenance::SurgeryFlow;
  double surgery_h = 0.0;   // H for surgery-flow tracks
  double time_shift = 0.0;  // for shifted tracks
  std::vector<TrackSlice> slices;
  std::vector<SurgeryEvent> events;
  TrackClosure closure = TrackClosure::Open;

  void add_slice(TrackSlice s);  // enforces strictly increasing times
  double t_begin() const { return slices.empty() ? 0.0 : slices.front().time; }
  double t_end() const { return slices.empty() ? 0.0 : slices.back().time; }
  // Largest gap between consecutive recorded times.
  double recording_interval() const;
  bool has_points() const;
};

// Cadence-based sink used by the evolvers.
struct TrackRecorder {
  SpaceTimeTrack* track = nullptr;
  double cadence = 0.0;
  double next_time = 0.0;

  // Cheap pre-check so callers build slices only when one will be stored.
  bool due(double t) const { return track != nullptr && t + 1e-300 >= next_time; }
  void force(TrackSlice s);
  void maybe(TrackSlice s);  // records when s.time crosses the cadence mark
};

struct SpaceTimePoint {
  double x = 0.0, r = 0.0, t = 0.0;
};

struct DistanceReport {
  double hausdorff = 0.0;
  SpaceTimePoint witness_a, witness_b;  // realizing pair
  std::vector<std::pair<double, double>> per_slice_a;  // (time, one-sided sup from a)
  std::vector<std::pair<double, double>> per_slice_b;
  double directed_ab = 0.0, directed_ba = 0.0;
};

// Hausdorff distance between the boundary point clouds of two tracks in
// (x, r, t) with the Euclidean metric; by rotational symmetry this equals the
// ambient R^(n+2) Hausdorff distance between the tracks.
DistanceReport hausdorff_distance(const SpaceTimeTrack& a, const SpaceTimeTrack& b,
                                  double cloud_gap);

// Slice at time t of the output equals slice at t + t_shift of the input;
// slices landing at t < 0 are dropped.
SpaceTimeTrack shift_track(const SpaceTimeTrack& a, double t_shift);

struct ContainmentReport {
  bool contained = false;
  double worst = 0.0;      // max over inner boundary points of signed distance
  double worst_time = 0.0;
  Vec2 worst_point{};
};

// True iff every boundary point of every nonempty inner slice lies within
// `tol` of the matching outer slice's region (signed distance <= tol).
// Outer must be a profile-backed track.
ContainmentReport contains_track(const SpaceTimeTrack& inner, const SpaceTimeTrack& outer,
                                 double tol);

// Closed-form comparison flows for avoidance checks.
struct ShrinkingSphere {
  double center_x = 0.0;
  double radius0 = 1.0;
  int n = 3;
  double radius_at(double t) const;   // sqrt(R0^2 - 2 n t)
  double extinction() const;          // R0^2 / (2 n)
};

// Per recorded time, min distance between the track's slice boundary and the
// comparison hypersurface. Throws NotDisjoint if they touch at t = 0.
std::vector<std::pair<double, double>> distance_series(const SpaceTimeTrack& a,
                                                       const ShrinkingSphere& sphere);

}  // namespace mcfs
