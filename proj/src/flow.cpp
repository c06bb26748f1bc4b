#include "mcfs/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcfs {

namespace {

constexpr int kBuffer = 3;       // nodes kept past each on-axis crossing
constexpr double kDenomFloor = 1e-30;
constexpr double kDustRel = 1e-13;

inline double rhs_at(int n, double w, double wl, double wr, double dx) {
  const double wp = (wr - wl) / (2.0 * dx);
  const double wpp = (wr - 2.0 * w + wl) / (dx * dx);
  double denom = 4.0 * w + wp * wp;
  if (w <= 0.0 && denom <= 0.25 * wp * wp) {
    // degenerate continuation node: pure reaction keeps it sinking
    return -2.0 * (n - 1);
  }
  denom = std::max(denom, kDenomFloor);
  return (4.0 * w * wpp - 2.0 * wp * wp) / denom - 2.0 * (n - 1);
}

inline double ghost_left(const AxialField& f) {
  return f.left == EndKind::Open ? f.w[1] : 2.0 * f.w[0] - f.w[1];
}

inline double ghost_right(const AxialField& f) {
  const std::size_t m = f.w.size();
  return f.right == EndKind::Open ? f.w[m - 2] : 2.0 * f.w[m - 1] - f.w[m - 2];
}

enum class FieldStep { Ok, Split, Died };

// Re-detect the positive core and restore the buffer layout after an update.
FieldStep classify_and_rebuild(AxialField& f) {
  const int m = static_cast<int>(f.w.size());
  double wscale = 0.0;
  for (double v : f.w) {
    if (!std::isfinite(v)) throw FlowStalled("non-finite radius field");
    wscale = std::max(wscale, std::fabs(v));
  }
  // positive runs
  struct Run { int lo, hi; double peak; };
  std::vector<Run> runs;
  for (int i = 0; i < m; ++i) {
    if (f.w[i] > 0.0) {
      if (runs.empty() || runs.back().hi != i - 1) runs.push_back({i, i, f.w[i]});
      else {
        runs.back().hi = i;
        runs.back().peak = std::max(runs.back().peak, f.w[i]);
      }
    }
  }
  // suppress numerical dust
  std::vector<Run> real;
  for (const auto& r : runs) {
    if (r.peak < kDustRel * wscale) {
      for (int i = r.lo; i <= r.hi; ++i) f.w[i] = 0.0;
    } else {
      real.push_back(r);
    }
  }
  if (real.empty()) return FieldStep::Died;
  if (real.size() > 1) return FieldStep::Split;
  const Run run = real.front();
  if (run.hi - run.lo + 1 < 3) return FieldStep::Died;
  if (f.left == EndKind::Open && run.lo != 0) return FieldStep::Died;
  if (f.right == EndKind::Open && run.hi != m - 1) return FieldStep::Died;
  f.core_lo = run.lo;
  f.core_hi = run.hi;
  if (f.left == EndKind::OnAxis) {
    while (f.core_lo < kBuffer) {
      f.w.insert(f.w.begin(), 3.0 * f.w[0] - 3.0 * f.w[1] + f.w[2]);
      f.x0 -= f.dx;
      ++f.core_lo;
      ++f.core_hi;
    }
    if (f.core_lo > kBuffer) {
      const int drop = f.core_lo - kBuffer;
      f.w.erase(f.w.begin(), f.w.begin() + drop);
      f.x0 += f.dx * drop;
      f.core_lo -= drop;
      f.core_hi -= drop;
    }
  }
  if (f.right == EndKind::OnAxis) {
    int mm = static_cast<int>(f.w.size());
    while (mm - 1 - f.core_hi < kBuffer) {
      f.w.push_back(3.0 * f.w[mm - 1] - 3.0 * f.w[mm - 2] + f.w[mm - 3]);
      ++mm;
    }
    if (mm - 1 - f.core_hi > kBuffer) {
      f.w.resize(static_cast<std::size_t>(f.core_hi + kBuffer + 1));
    }
  }
  return FieldStep::Ok;
}

FieldStep advance(AxialField& f, double dt, std::vector<double>& rhs) {
  const int m = static_cast<int>(f.w.size());
  rhs.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double wl = i == 0 ? ghost_left(f) : f.w[i - 1];
    const double wr = i == m - 1 ? ghost_right(f) : f.w[i + 1];
    rhs[i] = rhs_at(f.n, f.w[i], wl, wr, f.dx);
  }
  for (int i = 0; i < m; ++i) f.w[i] += dt * rhs[i];
  return classify_and_rebuild(f);
}

double state_max_mean(const FlowState& s) {
  double mx = 0.0;
  for (const auto& f : s.fields) mx = std::max(mx, field_max_mean(f));
  return mx;
}

}  // namespace

double AxialField::left_crossing() const {
  const double f0 = w[core_lo - 1];
  const double f1 = w[core_lo];
  const double t = f1 == f0 ? 0.0 : -f0 / (f1 - f0);
  return x(core_lo - 1) + t * dx;
}

double AxialField::right_crossing() const {
  const double f0 = w[core_hi];
  const double f1 = w[core_hi + 1];
  const double t = f1 == f0 ? 1.0 : f0 / (f0 - f1);
  return x(core_hi) + t * dx;
}

double AxialField::min_core_u() const {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = core_lo; i <= core_hi; ++i) mn = std::min(mn, w[i]);
  return std::sqrt(std::max(mn, 0.0));
}

ProfileCurve AxialField::to_profile() const {
  MonotoneCubic interp(x0, dx, w);
  double xl, xr;
  if (left == EndKind::OnAxis) {
    xl = interp.zero_in_cell(static_cast<std::size_t>(core_lo - 1));
  } else {
    xl = x(core_lo);
  }
  if (right == EndKind::OnAxis) {
    xr = interp.zero_in_cell(static_cast<std::size_t>(core_hi));
  } else {
    xr = x(core_hi);
  }
  const int N = std::max(5, static_cast<int>(std::lround((xr - xl) / dx)) + 1);
  const double dxp = (xr - xl) / (N - 1);
  ProfileCurve c;
  c.n = n;
  c.x0 = xl;
  c.dx = dxp;
  c.us.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const double wq = interp(xl + dxp * i);
    c.us[static_cast<std::size_t>(i)] = std::sqrt(std::max(wq, 1e-240));
  }
  c.left = left;
  c.right = right;
  if (left == EndKind::OnAxis) c.us.front() = 0.0;
  if (right == EndKind::OnAxis) c.us.back() = 0.0;
  c.validate();
  return c;
}

AxialField field_from_profile(const ProfileCurve& c) {
  c.validate();
  AxialField f;
  f.n = c.n;
  f.dx = c.dx;
  f.left = c.left;
  f.right = c.right;
  f.w.resize(c.us.size());
  for (std::size_t i = 0; i < c.us.size(); ++i) f.w[i] = c.us[i] * c.us[i];
  f.x0 = c.x0;
  f.core_lo = c.left == EndKind::OnAxis ? 1 : 0;
  f.core_hi = static_cast<int>(c.us.size()) - (c.right == EndKind::OnAxis ? 2 : 1);
  if (classify_and_rebuild(f) != FieldStep::Ok)
    throw MalformedProfile("field_from_profile: degenerate component");
  return f;
}

double field_max_mean(const AxialField& f) {
  double mx = -std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(f.w.size());
  for (int i = f.core_lo; i <= f.core_hi; ++i) {
    const double wl = i == 0 ? ghost_left(f) : f.w[i - 1];
    const double wr = i == m - 1 ? ghost_right(f) : f.w[i + 1];
    const double wp = (wr - wl) / (2.0 * f.dx);
    const double wpp = (wr - 2.0 * f.w[i] + wl) / (f.dx * f.dx);
    mx = std::max(mx, curvature_from_w(f.n, f.w[i], wp, wpp).mean);
  }
  // Axis-crossing limits: mean = 2n/|w'| at the zero of w. The slope is taken
  // from the parabola through the three nodes at the core end (exact for
  // spheres, where w is quadratic).
  if (f.left == EndKind::OnAxis) {
    const int i = f.core_lo;
    const double t = f.w[i] == f.w[i - 1]
                         ? 0.0
                         : -f.w[i - 1] / (f.w[i] - f.w[i - 1]);
    const double xc = f.x(i - 1) + t * f.dx;
    const double wp_c = (f.w[i + 1] - f.w[i - 1]) / (2.0 * f.dx);
    const double wpp_c = (f.w[i + 1] - 2.0 * f.w[i] + f.w[i - 1]) / (f.dx * f.dx);
    const double wp = wp_c + wpp_c * (xc - f.x(i));
    mx = std::max(mx, f.n * 2.0 / std::max(std::fabs(wp), kDenomFloor));
  }
  if (f.right == EndKind::OnAxis) {
    const int i = f.core_hi;
    const double t = f.w[i] == f.w[i + 1]
                         ? 1.0
                         : f.w[i] / (f.w[i] - f.w[i + 1]);
    const double xc = f.x(i) + t * f.dx;
    const double wp_c = (f.w[i + 1] - f.w[i - 1]) / (2.0 * f.dx);
    const double wpp_c = (f.w[i + 1] - 2.0 * f.w[i] + f.w[i - 1]) / (f.dx * f.dx);
    const double wp = wp_c + wpp_c * (xc - f.x(i));
    mx = std::max(mx, f.n * 2.0 / std::max(std::fabs(wp), kDenomFloor));
  }
  return mx;
}

double field_min_mean(const AxialField& f) {
  double mn = std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(f.w.size());
  for (int i = f.core_lo; i <= f.core_hi; ++i) {
    const double wl = i == 0 ? ghost_left(f) : f.w[i - 1];
    const double wr = i == m - 1 ? ghost_right(f) : f.w[i + 1];
    const double wp = (wr - wl) / (2.0 * f.dx);
    const double wpp = (wr - 2.0 * f.w[i] + wl) / (f.dx * f.dx);
    mn = std::min(mn, curvature_from_w(f.n, f.w[i], wp, wpp).mean);
  }
  return mn;
}

DomainSlice FlowState::slice() const {
  DomainSlice s;
  s.time = time;
  for (const auto& f : fields) s.components.push_back(f.to_profile());
  return s;
}

FlowState make_flow_state(const DomainSlice& s) {
  FlowState st;
  st.time = s.time;
  for (const auto& c : s.components) st.fields.push_back(field_from_profile(c));
  st.max_mean_curvature = state_max_mean(st);
  return st;
}

double cfl_dt(const FlowState& state) {
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& f : state.fields) {
    double wreact = std::numeric_limits<double>::infinity();
    const int lo = f.core_lo + (f.left == EndKind::OnAxis ? 2 : 0);
    const int hi = f.core_hi - (f.right == EndKind::OnAxis ? 2 : 0);
    if (lo <= hi) {
      for (int i = lo; i <= hi; ++i) wreact = std::min(wreact, f.w[i]);
    } else {
      // sub-resolution component: the peak radius is the surviving scale
      wreact = 0.0;
      for (int i = f.core_lo; i <= f.core_hi; ++i) wreact = std::max(wreact, f.w[i]);
    }
    bound = std::min(bound, std::min(f.dx * f.dx, wreact / (2.0 * (f.n - 1))));
  }
  return 0.2 * bound;
}

FlowState step(const FlowState& state, double dt) {
  if (dt == 0.0) return state;
  if (dt < 0.0) throw CflViolation("step: negative dt");
  const double bound = cfl_dt(state);
  if (dt > bound * (1.0 + 1e-12)) throw CflViolation("step: dt exceeds CFL bound");
  FlowState next = state;
  std::vector<double> rhs;
  std::vector<AxialField> kept;
  kept.reserve(next.fields.size());
  for (auto& f : next.fields) {
    switch (advance(f, dt, rhs)) {
      case FieldStep::Ok:
        kept.push_back(std::move(f));
        break;
      case FieldStep::Died:
        break;  // component shrank away within the step
      case FieldStep::Split:
        throw NegativeRadius("step: interior radius pinched off; subdivide dt");
    }
  }
  next.fields = std::move(kept);
  next.time = state.time + dt;
  next.dt_last = dt;
  next.max_mean_curvature = state_max_mean(next);
  return next;
}

namespace {

// Step with halving on interior pinch; returns false when dt underflows.
bool robust_step(const FlowState& state, double dt, double dt_min, FlowState* out,
                 double* dt_used) {
  while (dt >= dt_min) {
    try {
      *out = step(state, dt);
      *dt_used = dt;
      return true;
    } catch (const NegativeRadius&) {
      dt *= 0.5;
    }
  }
  return false;
}

}  // namespace

std::pair<FlowState, StopReason> evolve_until(FlowState state, double H, double t_end,
                                              TrackRecorder* recorder,
                                              const EvolveOptions& opts) {
  if (state.max_mean_curvature >= H)
    throw BadConfig("evolve_until: max mean curvature already at or above H");
  for (;;) {
    if (state.extinct()) {
      if (recorder) recorder->force(TrackSlice{state.time, state.slice(), {}, 0});
      return {std::move(state), StopReason::Extinct};
    }
    if (state.time >= t_end) return {std::move(state), StopReason::ReachedTEnd};
    double dt = std::min(cfl_dt(state), t_end - state.time);
    FlowState next;
    double dt_used = 0.0;
    if (!robust_step(state, dt, opts.dt_min, &next, &dt_used))
      return {std::move(state), StopReason::Stalled};
    if (next.max_mean_curvature >= H) {
      // bisect the offending step so H is attained within the tolerance
      double lo = 0.0, hi = dt_used;
      FlowState hi_state = next;
      bool hi_valid = true;
      int iter = 0;
      while (iter++ < opts.max_bisections &&
             !(hi_valid && hi_state.max_mean_curvature <= H * (1.0 + opts.crossing_tol))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= opts.dt_min && hi_valid) break;
        FlowState mid_state;
        double used;
        if (!robust_step(state, mid, std::min(mid, opts.dt_min), &mid_state, &used)) {
          hi = mid;
          hi_valid = false;
          continue;
        }
        if (mid_state.max_mean_curvature >= H) {
          hi = mid;
          hi_state = std::move(mid_state);
          hi_valid = true;
        } else {
          lo = mid;
        }
      }
      if (!hi_valid) return {std::move(state), StopReason::Stalled};
      state = std::move(hi_state);
      if (recorder) recorder->force(TrackSlice{state.time, state.slice(), {},
                                               static_cast<int>(state.fields.size())});
      return {std::move(state), StopReason::ReachedH};
    }
    state = std::move(next);
    if (recorder && recorder->due(state.time))
      recorder->force(TrackSlice{state.time, state.slice(), {},
                                 static_cast<int>(state.fields.size())});
  }
}

double extinction_time(const DomainSlice& initial) {
  if (initial.components.size() != 1)
    throw NotConvex("extinction_time: expects a single convex component");
  const auto samples = curvature_profile(initial.components.front());
  double max_mean = 0.0;
  for (const auto& s : samples) max_mean = std::max(max_mean, s.mean);
  for (const auto& s : samples) {
    if (s.kappa_axial < -1e-6 * std::max(1.0, max_mean))
      throw NotConvex("extinction_time: profile is not convex");
  }
  FlowState state = make_flow_state(initial);
  const double dx = initial.components.front().dx;
  const int n = initial.components.front().n;
  const double cell_volume = unit_ball_volume(n) * std::pow(dx, n) * dx;
  const double coeff = unit_ball_volume(n);
  const double dt_min = 1e-14;
  auto volume = [&]() {
    double vol = 0.0;
    for (const auto& f : state.fields) {
      for (int i = f.core_lo; i < f.core_hi; ++i) {
        vol += 0.5 * (std::pow(f.w[i], 0.5 * n) + std::pow(f.w[i + 1], 0.5 * n)) * f.dx;
      }
    }
    return coeff * vol;
  };
  for (;;) {
    if (state.extinct()) return state.time;
    if (volume() < cell_volume) return state.time;
    FlowState next;
    double used;
    if (!robust_step(state, cfl_dt(state), dt_min, &next, &used))
      throw FlowStalled("extinction_time: time step underflow");
    state = std::move(next);
  }
}

}  // namespace mcfs
