#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mcfs/errors.hpp"
#include "mcfs/numerics.hpp"

namespace mcfs {

enum class EndKind { OnAxis, Open };

// Discrete graph u(x) >= 0 over a uniform abscissa grid; rotated about the
// x-axis it represents one hypersurface component in R^(n+1).
struct ProfileCurve {
  int n = 3;  // hypersurface dimension (ambient R^(n+1)), n >= 3
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<double> us;
  EndKind left = EndKind::OnAxis;
  EndKind right = EndKind::OnAxis;

  std::size_t size() const { return us.size(); }
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double x_min() const { return x0; }
  double x_max() const { return x(us.size() - 1); }
  double max_u() const;
  std::vector<double> xs() const;
  void validate() const;  // throws MalformedProfile
};

// Builds a curve from explicit abscissae; checks uniform spacing (1e-12
// relative) and all ProfileCurve invariants.
ProfileCurve make_profile(int n, const std::vector<double>& xs, const std::vector<double>& us,
                          EndKind left, EndKind right);

struct CurvatureSample {
  double kappa_axial = 0.0;  // profile-curve principal curvature
  double kappa_rot = 0.0;    // rotational principal curvature (multiplicity n-1)
  double mean = 0.0;         // kappa_axial + (n-1)*kappa_rot
};

// Pointwise principal curvatures. Derivatives are taken in the lifted
// variable w = u^2, which is smooth through on-axis closures; the formulas
// are algebraically identical to the u-form
//   kappa_axial = -u'' / (1+u'^2)^(3/2),  kappa_rot = 1 / (u sqrt(1+u'^2))
// wherever u > 0, and reduce to kappa_axial == kappa_rot at the axis.
std::vector<CurvatureSample> curvature_profile(const ProfileCurve& c);

// Pointwise curvature from lifted-variable samples (w = u^2 and derivatives);
// regular through w = 0 where it reduces to kappa_axial = kappa_rot = 2/|w'|.
CurvatureSample curvature_from_w(int n, double w, double wp, double wpp);

struct TwoConvexity {
  bool two_convex = false;
  double margin = 0.0;       // min over samples of the two-smallest-sum
  std::size_t argmin = 0;
};

TwoConvexity is_two_convex(const ProfileCurve& c);

// Time slice of an evolving domain: disjoint rotationally symmetric bodies.
struct DomainSlice {
  std::vector<ProfileCurve> components;
  double time = 0.0;
};

// Signed half-plane distance to the slice boundary: negative inside the union
// of enclosed regions, positive outside, exact for the polyline boundary.
double distance_to_boundary(Vec2 p, const DomainSlice& s);

// Segment list of the boundary polylines (for bucketed queries).
std::vector<std::array<Vec2, 2>> boundary_segments(const DomainSlice& s);

// Maximal sub-curves separated at interior on-axis closures (u == 0).
std::vector<ProfileCurve> split_components(const DomainSlice& s);

// Boundary point sampling with arc spacing <= max_gap (polyline supersampling).
std::vector<Vec2> boundary_points(const ProfileCurve& c, double max_gap);
std::vector<Vec2> boundary_points(const DomainSlice& s, double max_gap);

// Volume of the enclosed region in R^(n+1) (trapezoidal in x).
double enclosed_volume(const ProfileCurve& c);
double enclosed_volume(const DomainSlice& s);

// Largest inscribed-ball radius estimate, sampled along the axis of symmetry.
double inradius_estimate(const ProfileCurve& c);

}  // namespace mcfs
