#include "mcfs/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcfs {

namespace {

constexpr double kDenomFloor = 1e-30;

// (w', w'') at node i with O(dx^2) one-sided stencils at the ends.
inline void w_derivatives(const std::vector<double>& w, std::size_t i, double dx,
                          double* wp, double* wpp) {
  const std::size_t n = w.size();
  const double inv = 1.0 / dx;
  const double inv2 = inv * inv;
  if (i == 0) {
    *wp = (-3.0 * w[0] + 4.0 * w[1] - w[2]) * 0.5 * inv;
    *wpp = (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) * inv2;
  } else if (i == n - 1) {
    *wp = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) * 0.5 * inv;
    *wpp = (2.0 * w[n - 1] - 5.0 * w[n - 2] + 4.0 * w[n - 3] - w[n - 4]) * inv2;
  } else {
    *wp = (w[i + 1] - w[i - 1]) * 0.5 * inv;
    *wpp = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv2;
  }
}

}  // namespace

CurvatureSample curvature_from_w(int n, double w, double wp, double wpp) {
  const double denom = std::max(4.0 * w + wp * wp, kDenomFloor);
  const double root = std::sqrt(denom);
  CurvatureSample s;
  s.kappa_rot = 2.0 / root;
  s.kappa_axial = -2.0 * (2.0 * w * wpp - wp * wp) / (denom * root);
  s.mean = s.kappa_axial + (n - 1) * s.kappa_rot;
  return s;
}

double ProfileCurve::max_u() const {
  double m = 0.0;
  for (double u : us) m = std::max(m, u);
  return m;
}

std::vector<double> ProfileCurve::xs() const {
  std::vector<double> out(us.size());
  for (std::size_t i = 0; i < us.size(); ++i) out[i] = x(i);
  return out;
}

void ProfileCurve::validate() const {
  if (n < 3) throw MalformedProfile("ProfileCurve: n must be >= 3");
  if (us.size() < 5) throw MalformedProfile("ProfileCurve: needs at least 5 samples");
  if (!(dx > 0.0)) throw MalformedProfile("ProfileCurve: nonpositive spacing");
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (!std::isfinite(us[i]) || us[i] < 0.0)
      throw MalformedProfile("ProfileCurve: negative or non-finite radius");
    const bool interior = i > 0 && i + 1 < us.size();
    if (interior && us[i] <= 0.0)
      throw MalformedProfile("ProfileCurve: zero radius at interior node " + std::to_string(i));
  }
  if (left == EndKind::OnAxis && us.front() != 0.0)
    throw MalformedProfile("ProfileCurve: on-axis left end must have u = 0");
  if (right == EndKind::OnAxis && us.back() != 0.0)
    throw MalformedProfile("ProfileCurve: on-axis right end must have u = 0");
  if (left == EndKind::Open && us.front() <= 0.0)
    throw MalformedProfile("ProfileCurve: open left end must have u > 0");
  if (right == EndKind::Open && us.back() <= 0.0)
    throw MalformedProfile("ProfileCurve: open right end must have u > 0");
}

ProfileCurve make_profile(int n, const std::vector<double>& xs, const std::vector<double>& us,
                          EndKind left, EndKind right) {
  if (xs.size() != us.size()) throw MalformedProfile("make_profile: xs/us length mismatch");
  if (xs.size() < 5) throw MalformedProfile("make_profile: needs at least 5 samples");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(dx > 0.0)) throw MalformedProfile("make_profile: abscissae not increasing");
  const double scale = std::max(1.0, std::max(std::fabs(xs.front()), std::fabs(xs.back())));
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (std::fabs(xs[i + 1] - xs[i] - dx) > 1e-12 * scale)
      throw MalformedProfile("make_profile: spacing not uniform at node " + std::to_string(i));
  }
  ProfileCurve c;
  c.n = n;
  c.x0 = xs.front();
  c.dx = dx;
  c.us = us;
  c.left = left;
  c.right = right;
  c.validate();
  return c;
}

std::vector<CurvatureSample> curvature_profile(const ProfileCurve& c) {
  c.validate();
  const std::size_t m = c.us.size();
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = c.us[i] * c.us[i];
  std::vector<CurvatureSample> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double wp, wpp;
    w_derivatives(w, i, c.dx, &wp, &wpp);
    out[i] = curvature_from_w(c.n, w[i], wp, wpp);
  }
  return out;
}

TwoConvexity is_two_convex(const ProfileCurve& c) {
  const auto samples = curvature_profile(c);
  TwoConvexity res;
  res.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // Principal curvatures are {kappa_axial, kappa_rot x (n-1)} with n-1 >= 2,
    // so the two smallest sum to kappa_axial + kappa_rot or 2*kappa_rot.
    const double sum2 = samples[i].kappa_axial < samples[i].kappa_rot
                            ? samples[i].kappa_axial + samples[i].kappa_rot
                            : 2.0 * samples[i].kappa_rot;
    if (sum2 < res.margin) {
      res.margin = sum2;
      res.argmin = i;
    }
  }
  res.two_convex = res.margin >= 0.0;
  return res;
}

std::vector<std::array<Vec2, 2>> boundary_segments(const DomainSlice& s) {
  std::vector<std::array<Vec2, 2>> segs;
  for (const auto& c : s.components) {
    for (std::size_t i = 0; i + 1 < c.us.size(); ++i) {
      segs.push_back({Vec2{c.x(i), c.us[i]}, Vec2{c.x(i + 1), c.us[i + 1]}});
    }
  }
  return segs;
}

namespace {

bool inside_component(Vec2 p, const ProfileCurve& c) {
  if (p.x < c.x_min() || p.x > c.x_max()) return false;
  double s = (p.x - c.x0) / c.dx;
  std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, s)), c.us.size() - 2);
  const double t = s - static_cast<double>(i);
  const double u = c.us[i] * (1.0 - t) + c.us[i + 1] * t;
  return p.r < u;
}

}  // namespace

double distance_to_boundary(Vec2 p, const DomainSlice& s) {
  if (s.components.empty()) throw EmptySlice("distance_to_boundary: empty slice");
  double best = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (const auto& c : s.components) {
    inside = inside || inside_component(p, c);
    for (std::size_t i = 0; i + 1 < c.us.size(); ++i) {
      best = std::min(best, point_segment_distance(p, Vec2{c.x(i), c.us[i]},
                                                   Vec2{c.x(i + 1), c.us[i + 1]}));
    }
  }
  return inside ? -best : best;
}

std::vector<ProfileCurve> split_components(const DomainSlice& s) {
  std::vector<ProfileCurve> out;
  for (const auto& c : s.components) {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= c.us.size(); ++i) {
      const bool cut = i == c.us.size() || (i > 0 && i + 1 < c.us.size() && c.us[i] == 0.0);
      if (!cut) continue;
      const std::size_t stop = i == c.us.size() ? i - 1 : i;
      if (stop - start + 1 >= 5) {
        ProfileCurve piece;
        piece.n = c.n;
        piece.dx = c.dx;
        piece.x0 = c.x(start);
        piece.us.assign(c.us.begin() + start, c.us.begin() + stop + 1);
        piece.left = start == 0 ? c.left : EndKind::OnAxis;
        piece.right = stop == c.us.size() - 1 ? c.right : EndKind::OnAxis;
        piece.validate();
        out.push_back(std::move(piece));
      }
      start = i;
    }
  }
  return out;
}

std::vector<Vec2> boundary_points(const ProfileCurve& c, double max_gap) {
  std::vector<Vec2> pts;
  pts.reserve(c.us.size());
  for (std::size_t i = 0; i + 1 < c.us.size(); ++i) {
    const Vec2 a{c.x(i), c.us[i]};
    const Vec2 b{c.x(i + 1), c.us[i + 1]};
    pts.push_back(a);
    const double len = std::hypot(b.x - a.x, b.r - a.r);
    const int extra = static_cast<int>(len / max_gap);
    for (int k = 1; k <= extra; ++k) {
      const double t = static_cast<double>(k) / (extra + 1);
      pts.push_back(Vec2{a.x + t * (b.x - a.x), a.r + t * (b.r - a.r)});
    }
  }
  pts.push_back(Vec2{c.x_max(), c.us.back()});
  return pts;
}

std::vector<Vec2> boundary_points(const DomainSlice& s, double max_gap) {
  std::vector<Vec2> pts;
  for (const auto& c : s.components) {
    auto p = boundary_points(c, max_gap);
    pts.insert(pts.end(), p.begin(), p.end());
  }
  return pts;
}

double enclosed_volume(const ProfileCurve& c) {
  const double coeff = unit_ball_volume(c.n);
  double vol = 0.0;
  for (std::size_t i = 0; i + 1 < c.us.size(); ++i) {
    const double a = std::pow(c.us[i], c.n);
    const double b = std::pow(c.us[i + 1], c.n);
    vol += 0.5 * (a + b) * c.dx;
  }
  return coeff * vol;
}

double enclosed_volume(const DomainSlice& s) {
  double vol = 0.0;
  for (const auto& c : s.components) vol += enclosed_volume(c);
  return vol;
}

double inradius_estimate(const ProfileCurve& c) {
  DomainSlice s;
  s.components.push_back(c);
  double best = 0.0;
  // The deepest point of a graph region lies on the axis of symmetry.
  for (std::size_t i = 0; i < c.us.size(); ++i) {
    const double d = distance_to_boundary(Vec2{c.x(i), 0.0}, s);
    best = std::max(best, -d);
  }
  return best;
}

}  // namespace mcfs
