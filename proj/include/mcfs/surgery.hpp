#pragma once

#include <string>
#include <vector>

#include "mcfs/profile.hpp"

namespace mcfs {

// Constants of the surgery procedure. H triggers a surgery when the maximum
// mean curvature reaches it; H1 = omega1*H and H2 = omega2*H set the neck-cut
// and post-surgery curvature scales.
struct SurgeryConfig {
  double H = 0.0;
  double omega1 = 0.5;
  double omega2 = 0.9;
  double lambda = 10.0;  // neck-length parameter, >= 10
  int max_surgeries = 64;

  double H1() const { return omega1 * H; }
  double H2() const { return omega2 * H; }
  void validate() const;
};

// Curvature threshold H0 below which a ball of radius epsilon could be lost
// by discarding: 2n / (epsilon * omega1).
double h0_threshold(double epsilon, const SurgeryConfig& cfg, int n);

// One planned cut: the slice z0 where the mean curvature first reaches H1
// walking inward from a region boundary, plus the resolved removal window.
struct CutSlice {
  double z0 = 0.0;
  double r_z0 = 0.0;       // mean radius of the cross-section at z0
  int side = +1;           // +1: region extends to the right of z0, -1: left
  double win_lo = 0.0;     // removed interval [win_lo, win_hi]
  double win_hi = 0.0;
  double lambda_eff = 0.0; // realized window length / (6 * r_z0)
};

// Connected region of {mean >= H1/2} meeting {mean >= H2} on one component.
struct NeckRegion {
  int component = 0;
  double a = 0.0, b = 0.0;
  int boundary_count = 0;   // open (non-axis) ends of the region: 0, 1 or 2
  bool whole_region = false;  // no admissible cut window fits
  std::vector<CutSlice> slices;
  double max_mean = 0.0;
  int node_lo = 0, node_hi = 0;  // sample index range of the region
};

struct CapInfo {
  double attach_x = 0.0;  // abscissa of the cut edge the cap closes
  double radius = 0.0;    // u at the cut edge
  double axial = 0.0;     // axial extent of the cap
  int dir = +1;           // direction the cap descends in
};

struct DiscardedComponent {
  ProfileCurve curve;
  std::string topology;   // SPHERE_LIKE | UNSUPPORTED
  double min_mean = 0.0;
  double inradius = 0.0;
};

// Full record of one surgery time.
struct SurgeryEvent {
  double time = 0.0;
  DomainSlice pre_slice;
  DomainSlice post_slice;
  std::vector<NeckRegion> regions;
  std::vector<std::array<double, 2>> cuts;  // removed x-intervals
  std::vector<CapInfo> caps;
  std::vector<DiscardedComponent> discarded;
  int standard_surgeries = 0;
  double post_max_mean = 0.0;
};

// Connected components of {mean >= H1/2} that meet {mean >= H2}, per
// component of the slice. Throws NoTrigger if max mean curvature < H.
std::vector<NeckRegion> find_high_curvature_regions(const DomainSlice& s,
                                                    const SurgeryConfig& cfg);

// For each open boundary of the region, the first abscissa walking inward
// where the mean curvature reaches H1, with the removal window resolved
// against the available room. Regions admitting no window are flagged
// whole_region and get no slices.
std::vector<CutSlice> locate_surgery_slice(NeckRegion& region, const DomainSlice& s,
                                           const SurgeryConfig& cfg);

// Removes the window of the cut and closes both ends with convex caps built
// inside the removed tube (u_post <= u_pre pointwise), then re-splits.
// Throws WindowOutOfRange / CapCurvatureExceeded.
DomainSlice standard_surgery(const DomainSlice& s, double z0, double r_z0, int side,
                             const SurgeryConfig& cfg);

// Internal form taking a fully resolved cut plan (used by perform_surgery).
DomainSlice apply_cut(const DomainSlice& s, const CutSlice& cut, const SurgeryConfig& cfg,
                      std::vector<CapInfo>* caps_out);

struct DiscardResult {
  DomainSlice kept;
  std::vector<DiscardedComponent> discarded;
};

// A component is discarded iff its minimum mean curvature >= H1/2.
DiscardResult discard_components(const DomainSlice& s, const SurgeryConfig& cfg);

}  // namespace mcfs
