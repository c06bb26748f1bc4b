#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace mcfs {

struct Vec2 {
  double x = 0.0;
  double r = 0.0;
};

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// Monotone cubic interpolant (Fritsch-Carlson slopes) on a uniform grid.
// Values y[i] live at x0 + i*dx.
class MonotoneCubic {
 public:
  MonotoneCubic(double x0, double dx, std::vector<double> y);
  double operator()(double x) const;
  // First zero crossing inside [x(i), x(i+1)]; requires a sign change there.
  double zero_in_cell(std::size_t i) const;
  double x(std::size_t i) const { return x0_ + dx_ * static_cast<double>(i); }
  std::size_t size() const { return y_.size(); }

 private:
  double x0_, dx_;
  std::vector<double> y_;
  std::vector<double> m_;  // endpoint slopes per node
};

// Bisection for a scalar root of f on [lo, hi] with f(lo), f(hi) of opposite sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iter = 80);

// Volume of the unit n-ball.
double unit_ball_volume(int n);

// Uniform spatial hash over 2-d segments for nearest-distance queries.
class SegmentGrid {
 public:
  SegmentGrid(std::vector<std::array<Vec2, 2>> segments, double cell);
  double distance(Vec2 p) const;  // exact min distance to the segment set
  bool empty() const { return segments_.empty(); }

 private:
  std::vector<std::array<Vec2, 2>> segments_;
  double cell_;
  double x_lo_, r_lo_;
  int nx_ = 0, nr_ = 0;
  std::vector<int> start_;    // bucket offsets (counting sort layout)
  std::vector<int> entries_;  // segment ids per bucket
};

}  // namespace mcfs
