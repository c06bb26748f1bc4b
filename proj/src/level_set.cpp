#include "mcfs/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace mcfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

// True when the zero set passes through the edge with endpoint values a, b
// (endpoint zeros included).
inline bool edge_crosses(double a, double b) {
  return ((a <= 0.0) != (b <= 0.0)) || a == 0.0 || b == 0.0;
}

// Refined crossing offset within [0, dx] from node value a to neighbor b
// (a, b of opposite sign), using the quadratic through a third sample c
// one node behind a when available.
double edge_root(double c_behind, double a, double b, double dx, bool have_behind) {
  const double lin = a / (a - b);
  if (!have_behind) return lin * dx;
  // parabola p(t) through p(-1)=c_behind, p(0)=a, p(1)=b; root in [0,1]
  const double A = 0.5 * (b + c_behind) - a;
  const double B = 0.5 * (b - c_behind);
  const double C = a;
  if (std::fabs(A) < 1e-14 * (std::fabs(B) + std::fabs(C))) return lin * dx;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return lin * dx;
  const double sq = std::sqrt(disc);
  const double t1 = (-B + sq) / (2.0 * A);
  const double t2 = (-B - sq) / (2.0 * A);
  double t = lin;
  if (t1 >= 0.0 && t1 <= 1.0) t = t1;
  else if (t2 >= 0.0 && t2 <= 1.0) t = t2;
  return std::clamp(t, 0.0, 1.0) * dx;
}

}  // namespace

void GridSpec::validate() const {
  if (!(dx > 0.0)) throw BadConfig("GridSpec: nonpositive spacing");
  if (!(x_hi > x_lo) || !(r_hi > 0.0)) throw BadConfig("GridSpec: empty domain");
}

LevelSetField signed_distance_init(const DomainSlice& s, const GridSpec& grid) {
  grid.validate();
  if (s.components.empty()) throw EmptySlice("signed_distance_init: empty slice");
  double x_min = kInf, x_max = -kInf, u_max = 0.0;
  for (const auto& c : s.components) {
    x_min = std::min(x_min, c.x_min());
    x_max = std::max(x_max, c.x_max());
    u_max = std::max(u_max, c.max_u());
  }
  const double margin = 10.0 * grid.dx;
  if (x_min - grid.x_lo < margin || grid.x_hi - x_max < margin || grid.r_hi - u_max < margin)
    throw DomainTooSmall("signed_distance_init: body too close to the grid boundary");

  LevelSetField f;
  f.grid = grid;
  f.n = s.components.front().n;
  f.time = s.time;
  const int nx = grid.nx(), nr = grid.nr();
  f.phi.assign(static_cast<std::size_t>(nx) * nr, kInf);

  SegmentGrid segs(boundary_segments(s), 3.0 * grid.dx);
  std::vector<char> inside(static_cast<std::size_t>(nx) * nr, 0);
  for (const auto& c : s.components) {
    const int i_lo = std::max(0, static_cast<int>(std::ceil((c.x_min() - grid.x_lo) / grid.dx)));
    const int i_hi = std::min(nx - 1, static_cast<int>(std::floor((c.x_max() - grid.x_lo) / grid.dx)));
    for (int i = i_lo; i <= i_hi; ++i) {
      const double x = grid.x_lo + i * grid.dx;
      double t = (x - c.x0) / c.dx;
      std::size_t j = std::min(static_cast<std::size_t>(std::max(0.0, t)), c.us.size() - 2);
      const double frac = t - static_cast<double>(j);
      const double u = c.us[j] * (1.0 - frac) + c.us[j + 1] * frac;
      const int k_top = std::min(nr - 1, static_cast<int>(std::floor(u / grid.dx)));
      for (int k = 0; k <= k_top; ++k) {
        if (k * grid.dx < u) inside[static_cast<std::size_t>(k) * nx + i] = 1;
      }
    }
  }
  for (int k = 0; k < nr; ++k) {
    for (int i = 0; i < nx; ++i) {
      const double d = segs.distance(Vec2{grid.x_lo + i * grid.dx, k * grid.dx});
      f.phi[static_cast<std::size_t>(k) * nx + i] =
          inside[static_cast<std::size_t>(k) * nx + i] ? -d : d;
    }
  }
  return f;
}

namespace {

// Single explicit update on the index range [k0, k1) x [i0, i1); reads `src`,
// writes `dst`. Ghosts: even mirror across r = 0, linear extrapolation at the
// other box sides.
void update_cells(const LevelSetField& f, const std::vector<double>& src,
                  std::vector<double>& dst, double dt, const std::vector<char>* mask) {
  const int nx = f.grid.nx(), nr = f.grid.nr();
  const double dx = f.grid.dx;
  const double inv2dx = 0.5 / dx;
  const double invdx2 = 1.0 / (dx * dx);
  const double s2 = f.sigma * f.sigma;
  const int nm1 = f.n - 1;
  auto P = [&](int i, int k) -> double {
    if (k < 0) k = -k;  // even in r
    else if (k > nr - 1) return 2.0 * src[static_cast<std::size_t>(nr - 1) * nx + std::clamp(i, 0, nx - 1)] -
                                 src[static_cast<std::size_t>(nr - 2) * nx + std::clamp(i, 0, nx - 1)];
    if (i < 0) return 2.0 * src[static_cast<std::size_t>(k) * nx] - src[static_cast<std::size_t>(k) * nx + 1];
    if (i > nx - 1) return 2.0 * src[static_cast<std::size_t>(k) * nx + nx - 1] -
                           src[static_cast<std::size_t>(k) * nx + nx - 2];
    return src[static_cast<std::size_t>(k) * nx + i];
  };
  for (int k = 0; k < nr; ++k) {
    const double r = k * dx;
    for (int i = 0; i < nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(k) * nx + i;
      if (mask && !(*mask)[idx]) {
        dst[idx] = src[idx];
        continue;
      }
      const double c = src[idx];
      const double L = P(i - 1, k), R = P(i + 1, k);
      const double B = P(i, k - 1), T = P(i, k + 1);
      const double px = (R - L) * inv2dx;
      const double pr = (T - B) * inv2dx;
      const double pxx = (R - 2.0 * c + L) * invdx2;
      const double prr = (T - 2.0 * c + B) * invdx2;
      const double pxr = (P(i + 1, k + 1) - P(i - 1, k + 1) - P(i + 1, k - 1) + P(i - 1, k - 1)) *
                         inv2dx * inv2dx;
      const double g2 = px * px + pr * pr + s2;
      const double div_term = (pxx * pr * pr - 2.0 * px * pr * pxr + prr * px * px) / g2;
      const double rot_term = k == 0 ? nm1 * prr : nm1 * pr / r;
      dst[idx] = c + dt * (div_term + rot_term);
    }
  }
}

}  // namespace

namespace {

// Narrow-band stepping: only cells within the band move; outside the band a
// signed-distance field is stationary up to the interface arrival, and the
// periodic reinitialization refreshes the band before that matters.
class BandStepper {
 public:
  explicit BandStepper(const LevelSetField& f, double band_width)
      : band_(band_width * f.grid.dx) {}

  void refresh(const LevelSetField& f, std::vector<double>& buf) {
    active_.clear();
    const int nx = f.grid.nx(), nr = f.grid.nr();
    for (int k = 0; k < nr; ++k) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t idx = static_cast<std::size_t>(k) * nx + i;
        if (std::fabs(f.phi[idx]) <= band_) active_.push_back(static_cast<int>(idx));
      }
    }
    buf = f.phi;  // inactive cells stay equal in both buffers
  }

  void step(LevelSetField& f, std::vector<double>& buf, double dt) const {
    const int nx = f.grid.nx(), nr = f.grid.nr();
    const double dx = f.grid.dx;
    const double inv2dx = 0.5 / dx;
    const double invdx2 = 1.0 / (dx * dx);
    const double s2 = f.sigma * f.sigma;
    const int nm1 = f.n - 1;
    const std::vector<double>& src = f.phi;
    auto P = [&](int i, int k) -> double {
      if (k < 0) k = -k;
      else if (k > nr - 1) return 2.0 * src[static_cast<std::size_t>(nr - 1) * nx + std::clamp(i, 0, nx - 1)] -
                                  src[static_cast<std::size_t>(nr - 2) * nx + std::clamp(i, 0, nx - 1)];
      if (i < 0) return 2.0 * src[static_cast<std::size_t>(k) * nx] - src[static_cast<std::size_t>(k) * nx + 1];
      if (i > nx - 1) return 2.0 * src[static_cast<std::size_t>(k) * nx + nx - 1] -
                             src[static_cast<std::size_t>(k) * nx + nx - 2];
      return src[static_cast<std::size_t>(k) * nx + i];
    };
    for (int id : active_) {
      const int k = id / nx, i = id % nx;
      const std::size_t idx = static_cast<std::size_t>(id);
      const double c = src[idx];
      double L, R, B, T, NE, NW, SE, SW;
      if (i > 0 && i < nx - 1 && k > 0 && k < nr - 1) {
        L = src[idx - 1];
        R = src[idx + 1];
        B = src[idx - nx];
        T = src[idx + nx];
        NE = src[idx + nx + 1];
        NW = src[idx + nx - 1];
        SE = src[idx - nx + 1];
        SW = src[idx - nx - 1];
      } else {
        L = P(i - 1, k);
        R = P(i + 1, k);
        B = P(i, k - 1);
        T = P(i, k + 1);
        NE = P(i + 1, k + 1);
        NW = P(i - 1, k + 1);
        SE = P(i + 1, k - 1);
        SW = P(i - 1, k - 1);
      }
      const double px = (R - L) * inv2dx;
      const double pr = (T - B) * inv2dx;
      const double pxx = (R - 2.0 * c + L) * invdx2;
      const double prr = (T - 2.0 * c + B) * invdx2;
      const double pxr = (NE - NW - SE + SW) * inv2dx * inv2dx;
      const double g2 = px * px + pr * pr + s2;
      const double div_term = (pxx * pr * pr - 2.0 * px * pr * pxr + prr * px * px) / g2;
      const double rot_term = k == 0 ? nm1 * prr : nm1 * pr / (k * dx);
      buf[idx] = c + dt * (div_term + rot_term);
    }
    f.phi.swap(buf);
    f.time += dt;
  }

 private:
  double band_;
  std::vector<int> active_;
};

}  // namespace

double lsf_safe_dt(const LevelSetField& f) {
  return f.grid.dx * f.grid.dx / (2.0 * (f.n + 1));
}

LevelSetField lsf_step(const LevelSetField& f, double dt) {
  if (dt < 0.0) throw CflViolation("lsf_step: negative dt");
  if (dt > 0.2 * f.grid.dx * f.grid.dx * (1.0 + 1e-12))
    throw CflViolation("lsf_step: dt exceeds 0.2 dx^2");
  LevelSetField out = f;
  if (dt == 0.0) return out;
  update_cells(f, f.phi, out.phi, dt, nullptr);
  out.time = f.time + dt;
  return out;
}

ContourData extract_contour(const LevelSetField& f) {
  ContourData out;
  const int nx = f.grid.nx(), nr = f.grid.nr();
  const double dx = f.grid.dx;
  // crossing offsets per edge; NaN when none
  std::vector<double> hx(static_cast<std::size_t>(nx) * nr, -1.0);  // edge (i,k)-(i+1,k)
  std::vector<double> vr(static_cast<std::size_t>(nx) * nr, -1.0);  // edge (i,k)-(i,k+1)
  auto phi_at = [&](int i, int k) { return f.phi[static_cast<std::size_t>(k) * nx + i]; };
  for (int k = 0; k < nr; ++k) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double a = phi_at(i, k), b = phi_at(i + 1, k);
      if (!edge_crosses(a, b)) continue;
      const double off =
          a == 0.0 ? 0.0 : edge_root(i > 0 ? phi_at(i - 1, k) : 0.0, a, b, dx, i > 0);
      hx[static_cast<std::size_t>(k) * nx + i] = off;
      out.points.push_back(Vec2{f.grid.x_lo + i * dx + off, k * dx});
    }
  }
  for (int k = 0; k + 1 < nr; ++k) {
    for (int i = 0; i < nx; ++i) {
      const double a = phi_at(i, k), b = phi_at(i, k + 1);
      if (!edge_crosses(a, b)) continue;
      const double off =
          a == 0.0 ? 0.0 : edge_root(k > 0 ? phi_at(i, k - 1) : 0.0, a, b, dx, k > 0);
      vr[static_cast<std::size_t>(k) * nx + i] = off;
      out.points.push_back(Vec2{f.grid.x_lo + i * dx, k * dx + off});
    }
  }
  // marching-squares chords per cell
  for (int k = 0; k + 1 < nr; ++k) {
    for (int i = 0; i + 1 < nx; ++i) {
      Vec2 hits[4];
      int nhit = 0;
      const double hb = hx[static_cast<std::size_t>(k) * nx + i];
      const double ht = hx[static_cast<std::size_t>(k + 1) * nx + i];
      const double vl = vr[static_cast<std::size_t>(k) * nx + i];
      const double vrr = vr[static_cast<std::size_t>(k) * nx + i + 1];
      if (hb >= 0.0) hits[nhit++] = Vec2{f.grid.x_lo + i * dx + hb, k * dx};
      if (vrr >= 0.0) hits[nhit++] = Vec2{f.grid.x_lo + (i + 1) * dx, k * dx + vrr};
      if (ht >= 0.0) hits[nhit++] = Vec2{f.grid.x_lo + i * dx + ht, (k + 1) * dx};
      if (vl >= 0.0) hits[nhit++] = Vec2{f.grid.x_lo + i * dx, k * dx + vl};
      if (nhit == 2) {
        out.segments.push_back({hits[0], hits[1]});
      } else if (nhit == 4) {
        // saddle: pair by the sign of the cell center
        const double mid = 0.25 * (phi_at(i, k) + phi_at(i + 1, k) + phi_at(i, k + 1) +
                                   phi_at(i + 1, k + 1));
        if ((mid < 0.0) == (phi_at(i, k) < 0.0)) {
          out.segments.push_back({hits[0], hits[1]});
          out.segments.push_back({hits[2], hits[3]});
        } else {
          out.segments.push_back({hits[0], hits[3]});
          out.segments.push_back({hits[1], hits[2]});
        }
      }
    }
  }
  return out;
}

bool has_zero_set(const LevelSetField& f) {
  bool any_neg = false, any_pos = false;
  for (double v : f.phi) {
    any_neg = any_neg || v <= 0.0;
    any_pos = any_pos || v > 0.0;
    if (any_neg && any_pos) return true;
  }
  return false;
}

int count_components(const LevelSetField& f) {
  const int nx = f.grid.nx(), nr = f.grid.nr();
  std::vector<char> seen(static_cast<std::size_t>(nx) * nr, 0);
  std::vector<int> stack;
  int count = 0;
  for (int k = 0; k < nr; ++k) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(k) * nx + i;
      if (f.phi[idx] > 0.0 || seen[idx]) continue;
      ++count;
      seen[idx] = 1;
      stack.push_back(static_cast<int>(idx));
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int ck = cur / nx, ci = cur % nx;
        const int nb[4][2] = {{ci - 1, ck}, {ci + 1, ck}, {ci, ck - 1}, {ci, ck + 1}};
        for (const auto& q : nb) {
          if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= nr) continue;
          const std::size_t qi = static_cast<std::size_t>(q[1]) * nx + q[0];
          if (!seen[qi] && f.phi[qi] <= 0.0) {
            seen[qi] = 1;
            stack.push_back(static_cast<int>(qi));
          }
        }
      }
    }
  }
  return count;
}

namespace {

// Crossing-preserving renormalization: interface nodes get the distance to
// the local line through the refined axis crossings; the rest of the band is
// rebuilt by fast sweeping. Far cells are left untouched.
void reinit_inplace(LevelSetField& f, double band) {
  const int nx = f.grid.nx(), nr = f.grid.nr();
  const double dx = f.grid.dx;
  const std::size_t total = f.phi.size();
  std::vector<double> u(total, kInf);  // unsigned distance work array
  std::vector<char> fixed(total, 0);
  auto phi_at = [&](int i, int k) { return f.phi[static_cast<std::size_t>(k) * nx + i]; };

  bool any_fixed = false;
  for (int k = 0; k < nr; ++k) {
    for (int i = 0; i < nx; ++i) {
      const double c = f.phi[static_cast<std::size_t>(k) * nx + i];
      double ax = kInf, ar = kInf;
      if (c == 0.0) {
        ax = 0.0;
      } else {
        if (i + 1 < nx && edge_crosses(c, phi_at(i + 1, k)))
          ax = std::min(ax, edge_root(i > 0 ? phi_at(i - 1, k) : 0.0, c, phi_at(i + 1, k), dx, i > 0));
        if (i > 0 && edge_crosses(c, phi_at(i - 1, k)))
          ax = std::min(ax, edge_root(i + 1 < nx ? phi_at(i + 1, k) : 0.0, c, phi_at(i - 1, k), dx,
                                      i + 1 < nx));
        if (k + 1 < nr && edge_crosses(c, phi_at(i, k + 1)))
          ar = std::min(ar, edge_root(k > 0 ? phi_at(i, k - 1) : 0.0, c, phi_at(i, k + 1), dx, k > 0));
        if (k > 0 && edge_crosses(c, phi_at(i, k - 1)))
          ar = std::min(ar, edge_root(k + 1 < nr ? phi_at(i, k + 1) : 0.0, c, phi_at(i, k - 1), dx,
                                      k + 1 < nr));
      }
      if (ax == kInf && ar == kInf) continue;
      double d;
      if (ax < kInf && ar < kInf) {
        d = ax * ar / std::hypot(ax, ar);
      } else {
        d = std::min(ax, ar);
      }
      const std::size_t idx = static_cast<std::size_t>(k) * nx + i;
      u[idx] = d;
      fixed[idx] = 1;
      any_fixed = true;
    }
  }
  if (!any_fixed) return;  // no zero set left

  // band rows as index intervals
  const double limit = band * dx;
  std::vector<std::array<int, 2>> rows(static_cast<std::size_t>(nr), {nx, -1});
  for (int k = 0; k < nr; ++k) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(k) * nx + i;
      if (std::fabs(f.phi[idx]) <= limit || fixed[idx]) {
        rows[static_cast<std::size_t>(k)][0] = std::min(rows[static_cast<std::size_t>(k)][0], i);
        rows[static_cast<std::size_t>(k)][1] = std::max(rows[static_cast<std::size_t>(k)][1], i);
      }
    }
  }
  auto relax = [&](int i, int k) {
    const std::size_t idx = static_cast<std::size_t>(k) * nx + i;
    if (fixed[idx]) return;
    double a = kInf, b = kInf;
    if (i > 0) a = std::min(a, u[idx - 1]);
    if (i + 1 < nx) a = std::min(a, u[idx + 1]);
    if (k > 0) b = std::min(b, u[idx - nx]);
    if (k + 1 < nr) b = std::min(b, u[idx + nx]);
    double cand;
    if (a == kInf && b == kInf) return;
    if (std::fabs(a - b) >= dx || a == kInf || b == kInf) {
      cand = std::min(a, b) + dx;
    } else {
      cand = 0.5 * (a + b + std::sqrt(2.0 * dx * dx - (a - b) * (a - b)));
    }
    if (cand < u[idx]) u[idx] = cand;
  };
  for (int round = 0; round < 3; ++round) {
    for (int k = 0; k < nr; ++k)
      for (int i = rows[static_cast<std::size_t>(k)][0]; i <= rows[static_cast<std::size_t>(k)][1]; ++i)
        relax(i, k);
    for (int k = 0; k < nr; ++k)
      for (int i = rows[static_cast<std::size_t>(k)][1]; i >= rows[static_cast<std::size_t>(k)][0]; --i)
        relax(i, k);
    for (int k = nr - 1; k >= 0; --k)
      for (int i = rows[static_cast<std::size_t>(k)][0]; i <= rows[static_cast<std::size_t>(k)][1]; ++i)
        relax(i, k);
    for (int k = nr - 1; k >= 0; --k)
      for (int i = rows[static_cast<std::size_t>(k)][1]; i >= rows[static_cast<std::size_t>(k)][0]; --i)
        relax(i, k);
  }
  for (int k = 0; k < nr; ++k) {
    for (int i = rows[static_cast<std::size_t>(k)][0]; i <= rows[static_cast<std::size_t>(k)][1]; ++i) {
      const std::size_t idx = static_cast<std::size_t>(k) * nx + i;
      if (u[idx] < kInf) f.phi[idx] = sgn(f.phi[idx]) * u[idx];
    }
  }
}

}  // namespace

LevelSetField reinitialize(const LevelSetField& f) {
  LevelSetField out = f;
  reinit_inplace(out, 1e30 / f.grid.dx);  // whole grid for the public operation
  return out;
}

LevelSetField evolve_lsf(const LevelSetField& f0, double t_end, TrackRecorder* recorder,
                         const LsfRunOptions& opts) {
  LevelSetField f = f0;
  const double dt = lsf_safe_dt(f);
  std::vector<double> buf;
  BandStepper stepper(f, opts.band_width);
  auto record = [&](bool force) {
    if (!recorder) return;
    if (!force && !recorder->due(f.time)) return;
    ContourData cd = extract_contour(f);
    TrackSlice s;
    s.time = f.time;
    s.contour = std::move(cd.points);
    s.component_count = s.contour.empty() ? 0 : count_components(f);
    recorder->force(std::move(s));
  };
  record(true);
  stepper.refresh(f, buf);
  long step_count = 0;
  while (f.time < t_end) {
    if (step_count % opts.reinit_every == 0 && step_count > 0) {
      reinit_inplace(f, opts.band_width);
      if (!has_zero_set(f)) break;
      stepper.refresh(f, buf);
    }
    const double h = std::min(dt, t_end - f.time);
    stepper.step(f, buf, h);
    ++step_count;
    record(false);
  }
  // final (possibly extinct) slice
  record(true);
  return f;
}

double compute_t_epsilon(const DomainSlice& s, double epsilon, const GridSpec& grid) {
  if (!(epsilon > 0.0)) throw NonpositiveEpsilon("compute_t_epsilon: epsilon must be positive");
  for (const auto& c : s.components) {
    if (!is_two_convex(c).two_convex)
      throw NotTwoConvex("compute_t_epsilon: initial slice must be two-convex");
  }
  LevelSetField f = signed_distance_init(s, grid);
  const double dt = lsf_safe_dt(f);
  const double band = 12.0 * grid.dx;
  std::vector<double> buf(f.phi.size());
  std::vector<char> mask(f.phi.size(), 1);
  auto refresh_mask = [&]() {
    for (std::size_t idx = 0; idx < f.phi.size(); ++idx)
      mask[idx] = std::fabs(f.phi[idx]) <= band ? 1 : 0;
  };
  refresh_mask();
  SegmentGrid init_segs(boundary_segments(s), 3.0 * grid.dx);
  const auto init_pts = boundary_points(s, 0.5 * grid.dx);

  auto boundary_gap = [&]() -> double {
    ContourData cd = extract_contour(f);
    if (cd.points.empty()) return -1.0;
    SegmentGrid evolved(cd.segments, 3.0 * grid.dx);
    double sup = 0.0;
    for (const auto& p : init_pts) sup = std::max(sup, evolved.distance(p));
    for (const auto& q : cd.points) sup = std::max(sup, init_segs.distance(q));
    return sup;
  };

  double t_prev = 0.0, d_prev = 0.0;
  long step_count = 0;
  const double t_cap = 10.0;  // generous; extinction is detected well before
  while (f.time < t_cap) {
    if (step_count % 50 == 0 && step_count > 0) {
      reinit_inplace(f, 12.0);
      refresh_mask();
    }
    update_cells(f, f.phi, buf, dt, &mask);
    f.phi.swap(buf);
    f.time += dt;
    ++step_count;
    if (step_count % 5 == 0) {
      const double d = boundary_gap();
      if (d < 0.0) throw NotReached("compute_t_epsilon: body went extinct before epsilon");
      if (d >= epsilon) {
        if (d == d_prev) return f.time;
        const double t = t_prev + (epsilon - d_prev) / (d - d_prev) * (f.time - t_prev);
        return std::clamp(t, t_prev, f.time);
      }
      t_prev = f.time;
      d_prev = d;
    }
  }
  throw NotReached("compute_t_epsilon: epsilon separation not reached");
}

}  // namespace mcfs
