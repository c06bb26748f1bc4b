#pragma once

#include <utility>
#include <vector>

#include "mcfs/profile.hpp"
#include "mcfs/spacetime.hpp"
#include "mcfs/surgery.hpp"

namespace mcfs {

// Solver state of one component: w = u^2 sampled on a uniform window that
// extends a few buffer nodes past each on-axis closure. w > 0 exactly on
// [core_lo, core_hi]; the axis crossing sits between core_lo-1 and core_lo.
// Evolving w instead of u removes the 1/u singularity at the axis and tracks
// spheres and cylinders exactly (their w is quadratic in x).
struct AxialField {
  int n = 3;
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<double> w;
  int core_lo = 0, core_hi = 0;
  EndKind left = EndKind::OnAxis;
  EndKind right = EndKind::OnAxis;

  double x(int i) const { return x0 + dx * i; }
  int core_size() const { return core_hi - core_lo + 1; }
  double left_crossing() const;   // interpolated u = 0 abscissa (OnAxis side)
  double right_crossing() const;
  double min_core_u() const;
  ProfileCurve to_profile() const;  // crossing-aligned uniform resample
};

AxialField field_from_profile(const ProfileCurve& c);

// Max mean curvature over core nodes and the axis-crossing limits.
double field_max_mean(const AxialField& f);
double field_min_mean(const AxialField& f);

enum class StopReason { ReachedH, Extinct, ReachedTEnd, Stalled };

struct FlowState {
  std::vector<AxialField> fields;
  double time = 0.0;
  double max_mean_curvature = 0.0;
  double dt_last = 0.0;
  int surgeries_done = 0;

  DomainSlice slice() const;
  bool extinct() const { return fields.empty(); }
};

FlowState make_flow_state(const DomainSlice& s);

// Largest admissible explicit step: 0.2 * min(dx^2, u_min^2 / (2(n-1))).
// The reaction bound uses the core radii away from on-axis closures (the
// lifted scheme has no singularity at the caps).
double cfl_dt(const FlowState& state);

// One explicit step. Throws CflViolation if dt exceeds the bound and
// NegativeRadius if an interior radius would pinch off within the step
// (the caller must subdivide). dt == 0 returns the state unchanged.
FlowState step(const FlowState& state, double dt);

struct EvolveOptions {
  double dt_min = 1e-14;
  double crossing_tol = 0.005;  // allowed overshoot of H, relative
  int max_bisections = 40;
};

// Adaptive evolution until the max mean curvature crosses H (bisected onto
// [H, (1+tol) H]), all components vanish, or t_end is reached. Slices go to
// the recorder at its cadence.
std::pair<FlowState, StopReason> evolve_until(FlowState state, double H, double t_end,
                                              TrackRecorder* recorder,
                                              const EvolveOptions& opts = {});

// Time at which the enclosed volume of a single convex component falls below
// one grid cell, evolving with no curvature cap.
double extinction_time(const DomainSlice& initial);

// Surgery orchestration at a state stopped with ReachedH: detect regions,
// cut necks, cap, discard, and return the resumable state plus the event.
std::pair<FlowState, SurgeryEvent> perform_surgery(const FlowState& state,
                                                   const SurgeryConfig& cfg);

}  // namespace mcfs
