#include "mcfs/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcfs {

std::vector<Vec2> TrackSlice::cloud(double max_gap) const {
  if (profile.has_value() && !profile->components.empty())
    return boundary_points(*profile, max_gap);
  return contour;
}

void SpaceTimeTrack::add_slice(TrackSlice s) {
  if (!slices.empty() && s.time <= slices.back().time) return;  // keep times strictly increasing
  slices.push_back(std::move(s));
}

double SpaceTimeTrack::recording_interval() const {
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < slices.size(); ++i)
    gap = std::max(gap, slices[i + 1].time - slices[i].time);
  return gap;
}

bool SpaceTimeTrack::has_points() const {
  for (const auto& s : slices)
    if (!s.empty()) return true;
  return false;
}

void TrackRecorder::force(TrackSlice s) {
  if (!track) return;
  const double t = s.time;
  track->add_slice(std::move(s));
  if (cadence > 0.0) {
    while (next_time <= t) next_time += cadence;
  }
}

void TrackRecorder::maybe(TrackSlice s) {
  if (!track) return;
  if (s.time + 1e-300 < next_time) return;
  force(std::move(s));
}

namespace {

struct Cloud {
  std::vector<SpaceTimePoint> pts;
  std::vector<std::size_t> slice_of;  // index of the originating slice
};

Cloud build_cloud(const SpaceTimeTrack& tr, double gap) {
  Cloud c;
  for (std::size_t si = 0; si < tr.slices.size(); ++si) {
    const auto& s = tr.slices[si];
    for (const Vec2& p : s.cloud(gap)) {
      c.pts.push_back(SpaceTimePoint{p.x, p.r, s.time});
      c.slice_of.push_back(si);
    }
  }
  return c;
}

// Uniform 3-d bucket grid over a point cloud with expanding-shell NN queries.
class PointGrid3 {
 public:
  PointGrid3(const std::vector<SpaceTimePoint>& pts, double cell) : pts_(pts), cell_(cell) {
    lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
    SpaceTimePoint hi{-lo_.x, -lo_.r, -lo_.t};
    for (const auto& p : pts_) {
      lo_.x = std::min(lo_.x, p.x);
      lo_.r = std::min(lo_.r, p.r);
      lo_.t = std::min(lo_.t, p.t);
      hi.x = std::max(hi.x, p.x);
      hi.r = std::max(hi.r, p.r);
      hi.t = std::max(hi.t, p.t);
    }
    nx_ = static_cast<int>((hi.x - lo_.x) / cell_) + 1;
    nr_ = static_cast<int>((hi.r - lo_.r) / cell_) + 1;
    nt_ = static_cast<int>((hi.t - lo_.t) / cell_) + 1;
    count_.assign(static_cast<std::size_t>(nx_) * nr_ * nt_ + 1, 0);
    std::vector<int> cell_of(pts_.size());
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      cell_of[i] = cell_index(pts_[i]);
      ++count_[static_cast<std::size_t>(cell_of[i]) + 1];
    }
    for (std::size_t b = 1; b < count_.size(); ++b) count_[b] += count_[b - 1];
    order_.resize(pts_.size());
    std::vector<int> cursor(count_.begin(), count_.end() - 1);
    for (std::size_t i = 0; i < pts_.size(); ++i)
      order_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(cell_of[i])]++)] =
          static_cast<int>(i);
  }

  // Nearest squared distance and index from p to the cloud.
  std::pair<double, int> nearest(const SpaceTimePoint& p) const {
    const int ci = std::clamp(static_cast<int>((p.x - lo_.x) / cell_), 0, nx_ - 1);
    const int cj = std::clamp(static_cast<int>((p.r - lo_.r) / cell_), 0, nr_ - 1);
    const int ck = std::clamp(static_cast<int>((p.t - lo_.t) / cell_), 0, nt_ - 1);
    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    const int ring_cap = std::max({nx_, nr_, nt_});
    for (int ring = 0; ring <= ring_cap; ++ring) {
      if (ring > 0) {
        const double ring_min = (ring - 1) * cell_;
        if (ring_min * ring_min > best) break;
      }
      for (int k = std::max(0, ck - ring); k <= std::min(nt_ - 1, ck + ring); ++k) {
        for (int j = std::max(0, cj - ring); j <= std::min(nr_ - 1, cj + ring); ++j) {
          for (int i = std::max(0, ci - ring); i <= std::min(nx_ - 1, ci + ring); ++i) {
            const bool shell = i == ci - ring || i == ci + ring || j == cj - ring ||
                               j == cj + ring || k == ck - ring || k == ck + ring;
            if (!shell) continue;
            const std::size_t b =
                (static_cast<std::size_t>(k) * nr_ + j) * static_cast<std::size_t>(nx_) + i;
            for (int e = count_[b]; e < count_[b + 1]; ++e) {
              const auto& q = pts_[static_cast<std::size_t>(order_[static_cast<std::size_t>(e)])];
              const double dx = p.x - q.x, dr = p.r - q.r, dt = p.t - q.t;
              const double d2 = dx * dx + dr * dr + dt * dt;
              if (d2 < best) {
                best = d2;
                best_id = order_[static_cast<std::size_t>(e)];
              }
            }
          }
        }
      }
    }
    return {best, best_id};
  }

 private:
  int cell_index(const SpaceTimePoint& p) const {
    const int i = std::clamp(static_cast<int>((p.x - lo_.x) / cell_), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>((p.r - lo_.r) / cell_), 0, nr_ - 1);
    const int k = std::clamp(static_cast<int>((p.t - lo_.t) / cell_), 0, nt_ - 1);
    return (k * nr_ + j) * nx_ + i;
  }

  const std::vector<SpaceTimePoint>& pts_;
  double cell_;
  SpaceTimePoint lo_;
  int nx_ = 1, nr_ = 1, nt_ = 1;
  std::vector<int> count_;
  std::vector<int> order_;
};

struct DirectedResult {
  double sup = 0.0;
  SpaceTimePoint from{}, to{};
  std::vector<std::pair<double, double>> per_slice;
};

DirectedResult directed_hausdorff(const Cloud& a, const SpaceTimeTrack& ta, const Cloud& b,
                                  double cell) {
  PointGrid3 grid(b.pts, cell);
  DirectedResult res;
  res.per_slice.assign(ta.slices.size(), {0.0, 0.0});
  for (std::size_t si = 0; si < ta.slices.size(); ++si)
    res.per_slice[si].first = ta.slices[si].time;
  for (std::size_t i = 0; i < a.pts.size(); ++i) {
    const auto [d2, id] = grid.nearest(a.pts[i]);
    const double d = std::sqrt(d2);
    auto& ps = res.per_slice[a.slice_of[i]];
    ps.second = std::max(ps.second, d);
    if (d > res.sup) {
      res.sup = d;
      res.from = a.pts[i];
      res.to = b.pts[static_cast<std::size_t>(id)];
    }
  }
  return res;
}

}  // namespace

DistanceReport hausdorff_distance(const SpaceTimeTrack& a, const SpaceTimeTrack& b,
                                  double cloud_gap) {
  if (!a.has_points() || !b.has_points()) throw EmptyTrack("hausdorff_distance: empty track");
  const Cloud ca = build_cloud(a, cloud_gap);
  const Cloud cb = build_cloud(b, cloud_gap);
  const double cell = 2.0 * cloud_gap;
  DirectedResult ab = directed_hausdorff(ca, a, cb, cell);
  DirectedResult ba = directed_hausdorff(cb, b, ca, cell);
  DistanceReport rep;
  rep.directed_ab = ab.sup;
  rep.directed_ba = ba.sup;
  rep.hausdorff = std::max(ab.sup, ba.sup);
  if (ab.sup >= ba.sup) {
    rep.witness_a = ab.from;
    rep.witness_b = ab.to;
  } else {
    rep.witness_a = ba.to;
    rep.witness_b = ba.from;
  }
  rep.per_slice_a = std::move(ab.per_slice);
  rep.per_slice_b = std::move(ba.per_slice);
  return rep;
}

SpaceTimeTrack shift_track(const SpaceTimeTrack& a, double t_shift) {
  if (t_shift < 0.0) throw BadConfig("shift_track: negative shift");
  SpaceTimeTrack out;
  out.provenance = Provenance::Shifted;
  out.surgery_h = a.surgery_h;
  out.time_shift = a.time_shift + t_shift;
  out.closure = a.closure;
  for (const auto& s : a.slices) {
    if (s.time + 1e-300 < t_shift) continue;
    TrackSlice ns = s;
    ns.time = s.time - t_shift;
    out.add_slice(std::move(ns));
  }
  return out;
}

ContainmentReport contains_track(const SpaceTimeTrack& inner, const SpaceTimeTrack& outer,
                                 double tol) {
  if (inner.slices.empty() || outer.slices.empty())
    throw EmptyTrack("contains_track: empty track");
  const double interval =
      std::max(inner.recording_interval(), outer.recording_interval());
  ContainmentReport rep;
  rep.contained = true;
  rep.worst = -std::numeric_limits<double>::infinity();
  std::size_t oi = 0;
  for (const auto& is : inner.slices) {
    if (is.empty()) continue;
    while (oi + 1 < outer.slices.size() &&
           std::fabs(outer.slices[oi + 1].time - is.time) <=
               std::fabs(outer.slices[oi].time - is.time))
      ++oi;
    const auto& os = outer.slices[oi];
    if (std::fabs(os.time - is.time) > 1.25 * interval + 1e-300) {
      if (is.time > outer.t_end()) {
        // inner outlives outer: not contained
        rep.contained = false;
        rep.worst = std::numeric_limits<double>::infinity();
        rep.worst_time = is.time;
        continue;
      }
      throw TimeMismatch("contains_track: recording gap exceeds one interval");
    }
    if (!os.profile.has_value())
      throw BadConfig("contains_track: outer track must be profile-backed");
    if (os.profile->components.empty()) {
      rep.contained = false;
      rep.worst = std::numeric_limits<double>::infinity();
      rep.worst_time = is.time;
      continue;
    }
    for (const Vec2& p : is.cloud(std::max(tol, 1e-9))) {
      const double d = distance_to_boundary(p, *os.profile);
      if (d > rep.worst) {
        rep.worst = d;
        rep.worst_time = is.time;
        rep.worst_point = p;
      }
      if (d > tol) rep.contained = false;
    }
  }
  return rep;
}

double ShrinkingSphere::radius_at(double t) const {
  const double r2 = radius0 * radius0 - 2.0 * n * t;
  return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

double ShrinkingSphere::extinction() const { return radius0 * radius0 / (2.0 * n); }

std::vector<std::pair<double, double>> distance_series(const SpaceTimeTrack& a,
                                                       const ShrinkingSphere& sphere) {
  if (!a.has_points()) throw EmptyTrack("distance_series: empty track");
  std::vector<std::pair<double, double>> series;
  for (const auto& s : a.slices) {
    if (s.time >= sphere.extinction()) break;
    if (s.empty()) continue;
    const double R = sphere.radius_at(s.time);
    double mn = std::numeric_limits<double>::infinity();
    bool any_inside = false, any_outside = false;
    for (const Vec2& p : s.cloud(0.05 * sphere.radius0)) {
      const double rho = std::hypot(p.x - sphere.center_x, p.r);
      (rho < R ? any_inside : any_outside) = true;
      mn = std::min(mn, std::fabs(rho - R));
    }
    if (series.empty() && (mn <= 0.0 || (any_inside && any_outside)))
      throw NotDisjoint("distance_series: comparison flow touches the track at t = 0");
    series.emplace_back(s.time, mn);
  }
  return series;
}

}  // namespace mcfs
