#pragma once

#include <cmath>
#include <vector>

#include "mcfs/profile.hpp"
#include "mcfs/spacetime.hpp"

namespace mcfs {

// Half-plane grid (x, r) with r starting at 0 and dx = dr.
struct GridSpec {
  double x_lo = 0.0, x_hi = 0.0;
  double r_hi = 0.0;
  double dx = 0.0;

  int nx() const { return static_cast<int>(std::lround((x_hi - x_lo) / dx)) + 1; }
  int nr() const { return static_cast<int>(std::lround(r_hi / dx)) + 1; }
  void validate() const;
};

// Grid function phi whose sublevel set {phi <= 0} is the evolving domain
// slice; signed-distance-like, even in r across the axis.
struct LevelSetField {
  GridSpec grid;
  int n = 3;
  double time = 0.0;
  double sigma = 1e-6;  // gradient regularization in the curvature denominator
  std::vector<double> phi;  // row-major, phi[k * nx + i] at (x_lo + i dx, k dx)

  double& at(int i, int k) { return phi[static_cast<std::size_t>(k) * grid.nx() + i]; }
  double at(int i, int k) const { return phi[static_cast<std::size_t>(k) * grid.nx() + i]; }
};

// phi(p) = signed distance to the slice boundary, exact for the polylines.
LevelSetField signed_distance_init(const DomainSlice& s, const GridSpec& grid);

// One explicit step of phi_t = |grad phi| div(grad phi/|grad phi|) + (n-1) phi_r / r,
// with the axis term evaluated as (n-1) phi_rr at r = 0 by even symmetry.
// Requires dt <= 0.2 dx^2.
LevelSetField lsf_step(const LevelSetField& f, double dt);

// Interior time step used by the evolver (stable for the axis term).
double lsf_safe_dt(const LevelSetField& f);

// Restores |grad phi| ~= 1 near the zero set without moving it: crossing-
// preserving local distances at interface nodes, fast sweeping outward.
LevelSetField reinitialize(const LevelSetField& f);

struct ContourData {
  std::vector<Vec2> points;                     // refined edge crossings
  std::vector<std::array<Vec2, 2>> segments;    // marching-squares chords
};

ContourData extract_contour(const LevelSetField& f);
int count_components(const LevelSetField& f);  // 4-connected cells of {phi <= 0}
bool has_zero_set(const LevelSetField& f);

struct LsfRunOptions {
  int reinit_every = 50;
  double band_width = 12.0;  // in units of dx
  double t_end = 0.0;
};

// Steps to t_end with periodic reinitialization, recording contour slices at
// the recorder cadence; continues through topological changes.
LevelSetField evolve_lsf(const LevelSetField& f0, double t_end, TrackRecorder* recorder,
                         const LsfRunOptions& opts = {});

// Time at which the Hausdorff distance between the initial boundary and the
// evolved boundary reaches epsilon (within 0.5 dx). Throws NotReached if the
// body goes extinct first.
double compute_t_epsilon(const DomainSlice& s, double epsilon, const GridSpec& grid);

}  // namespace mcfs
