#include "mcfs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mcfs {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double vx = b.x - a.x, vr = b.r - a.r;
  const double len2 = vx * vx + vr * vr;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * vx + (p.r - a.r) * vr) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double dx = p.x - (a.x + t * vx);
  const double dr = p.r - (a.r + t * vr);
  return std::sqrt(dx * dx + dr * dr);
}

MonotoneCubic::MonotoneCubic(double x0, double dx, std::vector<double> y)
    : x0_(x0), dx_(dx), y_(std::move(y)) {
  const std::size_t n = y_.size();
  if (n < 2) throw std::invalid_argument("MonotoneCubic needs >= 2 samples");
  m_.resize(n, 0.0);
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / dx_;
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m_[i] = 0.0;
    } else {
      m_[i] = 0.5 * (d[i - 1] + d[i]);
      const double lim = 3.0 * std::min(std::fabs(d[i - 1]), std::fabs(d[i]));
      m_[i] = std::clamp(m_[i], -lim, lim);
    }
  }
}

double MonotoneCubic::operator()(double xq) const {
  const std::size_t n = y_.size();
  double s = (xq - x0_) / dx_;
  std::size_t i = 0;
  if (s >= static_cast<double>(n - 1)) {
    i = n - 2;
  } else if (s > 0.0) {
    i = static_cast<std::size_t>(s);
  }
  const double t = s - static_cast<double>(i);
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * y_[i] + h10 * dx_ * m_[i] + h01 * y_[i + 1] + h11 * dx_ * m_[i + 1];
}

double MonotoneCubic::zero_in_cell(std::size_t i) const {
  double lo = x(i), hi = x(i + 1);
  double flo = y_[i], fhi = y_[i + 1];
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::invalid_argument("zero_in_cell: no sign change");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = (*this)(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::invalid_argument("bisect_root: no bracket");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double unit_ball_volume(int n) {
  const double nd = static_cast<double>(n);
  return std::pow(std::numbers::pi, 0.5 * nd) / std::tgamma(0.5 * nd + 1.0);
}

SegmentGrid::SegmentGrid(std::vector<std::array<Vec2, 2>> segments, double cell)
    : segments_(std::move(segments)), cell_(cell) {
  if (segments_.empty()) return;
  double x_hi = -std::numeric_limits<double>::infinity();
  double r_hi = x_hi;
  x_lo_ = std::numeric_limits<double>::infinity();
  r_lo_ = x_lo_;
  for (const auto& s : segments_) {
    for (const auto& p : s) {
      x_lo_ = std::min(x_lo_, p.x);
      r_lo_ = std::min(r_lo_, p.r);
      x_hi = std::max(x_hi, p.x);
      r_hi = std::max(r_hi, p.r);
    }
  }
  nx_ = static_cast<int>((x_hi - x_lo_) / cell_) + 1;
  nr_ = static_cast<int>((r_hi - r_lo_) / cell_) + 1;
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx_) * nr_);
  for (std::size_t id = 0; id < segments_.size(); ++id) {
    const auto& s = segments_[id];
    const int ia = std::clamp(static_cast<int>((std::min(s[0].x, s[1].x) - x_lo_) / cell_), 0, nx_ - 1);
    const int ib = std::clamp(static_cast<int>((std::max(s[0].x, s[1].x) - x_lo_) / cell_), 0, nx_ - 1);
    const int ja = std::clamp(static_cast<int>((std::min(s[0].r, s[1].r) - r_lo_) / cell_), 0, nr_ - 1);
    const int jb = std::clamp(static_cast<int>((std::max(s[0].r, s[1].r) - r_lo_) / cell_), 0, nr_ - 1);
    for (int i = ia; i <= ib; ++i)
      for (int j = ja; j <= jb; ++j)
        buckets[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(id));
  }
  start_.assign(buckets.size() + 1, 0);
  for (std::size_t b = 0; b < buckets.size(); ++b)
    start_[b + 1] = start_[b] + static_cast<int>(buckets[b].size());
  entries_.resize(static_cast<std::size_t>(start_.back()));
  for (std::size_t b = 0; b < buckets.size(); ++b)
    std::copy(buckets[b].begin(), buckets[b].end(), entries_.begin() + start_[b]);
}

double SegmentGrid::distance(Vec2 p) const {
  if (segments_.empty()) return std::numeric_limits<double>::infinity();
  const int ci = std::clamp(static_cast<int>((p.x - x_lo_) / cell_), 0, nx_ - 1);
  const int cj = std::clamp(static_cast<int>((p.r - r_lo_) / cell_), 0, nr_ - 1);
  double best = std::numeric_limits<double>::infinity();
  const int ring_max = std::max(nx_, nr_);
  for (int ring = 0; ring <= ring_max; ++ring) {
    // Cells in this ring cannot beat `best` once the ring is provably farther.
    if (ring > 0) {
      const double ring_min = (ring - 1) * cell_;
      if (ring_min > best) break;
    }
    bool any = false;
    const int i0 = ci - ring, i1 = ci + ring, j0 = cj - ring, j1 = cj + ring;
    for (int j = std::max(0, j0); j <= std::min(nr_ - 1, j1); ++j) {
      for (int i = std::max(0, i0); i <= std::min(nx_ - 1, i1); ++i) {
        if (ring > 0 && i != i0 && i != i1 && j != j0 && j != j1) continue;  // interior already done
        any = true;
        const std::size_t b = static_cast<std::size_t>(j) * nx_ + i;
        for (int e = start_[b]; e < start_[b + 1]; ++e) {
          const auto& s = segments_[static_cast<std::size_t>(entries_[e])];
          best = std::min(best, point_segment_distance(p, s[0], s[1]));
        }
      }
    }
    if (!any && ring > 0 && (i1 < 0 || i0 >= nx_) && (j1 < 0 || j0 >= nr_)) break;
  }
  return best;
}

}  // namespace mcfs
