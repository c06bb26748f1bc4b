#include "mcfs/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mcfs/flow.hpp"

namespace mcfs {

void SurgeryConfig::validate() const {
  if (!(H > 0.0)) throw BadConfig("SurgeryConfig: H must be positive");
  if (!(0.0 < omega1 && omega1 < omega2 && omega2 < 1.0))
    throw BadConfig("SurgeryConfig: need 0 < omega1 < omega2 < 1");
  if (!(lambda >= 10.0)) throw BadConfig("SurgeryConfig: lambda must be >= 10");
  if (max_surgeries < 0) throw BadConfig("SurgeryConfig: negative surgery cap");
}

double h0_threshold(double epsilon, const SurgeryConfig& cfg, int n) {
  if (!(epsilon > 0.0)) throw NonpositiveEpsilon("h0_threshold: epsilon must be positive");
  return 2.0 * n / (epsilon * cfg.omega1);
}

namespace {

struct RegionNodes {
  int lo = 0, hi = 0;  // node index range of {mean >= H1/2}
};

std::vector<double> mean_curvatures(const ProfileCurve& c) {
  const auto samples = curvature_profile(c);
  std::vector<double> mean(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) mean[i] = samples[i].mean;
  return mean;
}

// Crossing abscissa of `mean` through level T between nodes i_out and i_in.
double level_crossing(const ProfileCurve& c, const std::vector<double>& mean, int i_out,
                      int i_in, double T) {
  const double m0 = mean[static_cast<std::size_t>(i_out)];
  const double m1 = mean[static_cast<std::size_t>(i_in)];
  const double t = m1 == m0 ? 0.5 : (T - m0) / (m1 - m0);
  return c.x(static_cast<std::size_t>(i_out)) +
         std::clamp(t, 0.0, 1.0) * (c.x(static_cast<std::size_t>(i_in)) -
                                    c.x(static_cast<std::size_t>(i_out)));
}

}  // namespace

std::vector<NeckRegion> find_high_curvature_regions(const DomainSlice& s,
                                                    const SurgeryConfig& cfg) {
  cfg.validate();
  if (s.components.empty()) throw EmptySlice("find_high_curvature_regions: empty slice");
  std::vector<std::vector<double>> means;
  double global_max = 0.0;
  for (const auto& c : s.components) {
    means.push_back(mean_curvatures(c));
    for (double m : means.back()) global_max = std::max(global_max, m);
  }
  if (global_max < 0.99 * cfg.H)
    throw NoTrigger("find_high_curvature_regions: max mean curvature below H");
  const double t_lo = 0.5 * cfg.H1();
  const double t_hi = cfg.H2();
  std::vector<NeckRegion> regions;
  for (std::size_t ci = 0; ci < s.components.size(); ++ci) {
    const auto& c = s.components[ci];
    const auto& mean = means[ci];
    const int last = static_cast<int>(mean.size()) - 1;
    int i = 0;
    while (i <= last) {
      if (mean[static_cast<std::size_t>(i)] < t_lo) {
        ++i;
        continue;
      }
      int j = i;
      double peak = 0.0;
      while (j <= last && mean[static_cast<std::size_t>(j)] >= t_lo) {
        peak = std::max(peak, mean[static_cast<std::size_t>(j)]);
        ++j;
      }
      const int lo = i, hi = j - 1;
      i = j;
      if (peak < t_hi) continue;  // region must meet {mean >= H2}
      NeckRegion reg;
      reg.component = static_cast<int>(ci);
      reg.max_mean = peak;
      reg.a = lo == 0 ? c.x_min() : level_crossing(c, mean, lo - 1, lo, t_lo);
      reg.b = hi == last ? c.x_max() : level_crossing(c, mean, hi + 1, hi, t_lo);
      reg.boundary_count = (lo > 0 ? 1 : 0) + (hi < last ? 1 : 0);
      reg.node_lo = lo;
      reg.node_hi = hi;
      regions.push_back(std::move(reg));
    }
  }
  return regions;
}

std::vector<CutSlice> locate_surgery_slice(NeckRegion& region, const DomainSlice& s,
                                           const SurgeryConfig& cfg) {
  region.slices.clear();
  region.whole_region = false;
  if (region.boundary_count == 0) return {};
  const auto& c = s.components[static_cast<std::size_t>(region.component)];
  const auto mean = mean_curvatures(c);
  const double H1 = cfg.H1();
  const int last = static_cast<int>(mean.size()) - 1;
  const bool left_open = region.node_lo > 0;
  const bool right_open = region.node_hi < last;
  const double dx = c.dx;

  // H1 slices walking inward from each open boundary.
  int zi_left = -1, zi_right = -1;
  if (left_open) {
    int i = region.node_lo;
    while (i <= region.node_hi && mean[static_cast<std::size_t>(i)] < H1) ++i;
    zi_left = std::min(i, region.node_hi);
  }
  if (right_open) {
    int i = region.node_hi;
    while (i >= region.node_lo && mean[static_cast<std::size_t>(i)] < H1) --i;
    zi_right = std::max(i, region.node_lo);
  }

  struct Side {
    int zi;
    int dir;  // +1: region extends rightward from the boundary
    double boundary;
  };
  std::vector<Side> sides;
  if (left_open) sides.push_back({zi_left, +1, region.a});
  if (right_open) sides.push_back({zi_right, -1, region.b});

  // Inner budget: room the window may claim toward the region core.
  double inner_budget_left = 0.0, inner_budget_right = 0.0;
  if (left_open && right_open) {
    const double rl = (c.n - 1) / mean[static_cast<std::size_t>(zi_left)];
    const double rr = (c.n - 1) / mean[static_cast<std::size_t>(zi_right)];
    const double middle_min = std::max(10.0 * dx, 2.0 * (rl + rr));
    const double avail = c.x(static_cast<std::size_t>(zi_right)) -
                         c.x(static_cast<std::size_t>(zi_left)) - middle_min;
    inner_budget_left = inner_budget_right = 0.5 * avail;
  } else if (left_open) {
    const double rz = (c.n - 1) / mean[static_cast<std::size_t>(zi_left)];
    inner_budget_left = c.x(static_cast<std::size_t>(region.node_hi)) -
                        c.x(static_cast<std::size_t>(zi_left)) - std::max(6.0 * dx, 2.0 * rz);
  } else if (right_open) {
    const double rz = (c.n - 1) / mean[static_cast<std::size_t>(zi_right)];
    inner_budget_right = c.x(static_cast<std::size_t>(zi_right)) -
                         c.x(static_cast<std::size_t>(region.node_lo)) -
                         std::max(6.0 * dx, 2.0 * rz);
  }

  std::vector<CutSlice> cuts;
  for (const Side& side : sides) {
    CutSlice cut;
    cut.z0 = c.x(static_cast<std::size_t>(side.zi));
    // mean radius of the slice: the radius of the round cross-section with
    // this curvature scale, (n-1)/H(Sigma_z)
    cut.r_z0 = (c.n - 1) / mean[static_cast<std::size_t>(side.zi)];
    cut.side = side.dir;
    const double target = 3.0 * cfg.lambda * cut.r_z0;
    const double out_room = std::fabs(cut.z0 - side.boundary) - 2.0 * dx;
    const double inner_budget = side.dir > 0 ? inner_budget_left : inner_budget_right;
    const double w_out = std::min(target, std::max(0.0, out_room));
    const double w_in = std::min(target, std::max(0.0, inner_budget));
    const double w_total = w_out + w_in;
    if (w_total < std::max(6.0 * dx, 2.0 * cut.r_z0)) {
      region.whole_region = true;
      region.slices.clear();
      return {};
    }
    cut.lambda_eff = w_total / (6.0 * cut.r_z0);
    if (side.dir > 0) {
      cut.win_lo = cut.z0 - w_out;
      cut.win_hi = cut.z0 + w_in;
    } else {
      cut.win_lo = cut.z0 - w_in;
      cut.win_hi = cut.z0 + w_out;
    }
    cuts.push_back(cut);
  }
  region.slices = cuts;
  return cuts;
}

DomainSlice apply_cut(const DomainSlice& s, const CutSlice& cut, const SurgeryConfig& cfg,
                      std::vector<CapInfo>* caps_out) {
  int ci = -1;
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    if (s.components[k].x_min() < cut.win_lo && cut.win_hi < s.components[k].x_max()) {
      ci = static_cast<int>(k);
      break;
    }
  }
  if (ci < 0) throw WindowOutOfRange("apply_cut: window not strictly inside a component");
  const ProfileCurve& c = s.components[static_cast<std::size_t>(ci)];
  const double dx = c.dx;
  const int last = static_cast<int>(c.us.size()) - 1;
  int e_lo = static_cast<int>(std::lround((cut.win_lo - c.x0) / dx));
  int e_hi = static_cast<int>(std::lround((cut.win_hi - c.x0) / dx));
  e_lo = std::clamp(e_lo, 1, last - 1);
  e_hi = std::clamp(e_hi, 1, last - 1);
  const int K = e_hi - e_lo;
  if (K < 4) throw WindowOutOfRange("apply_cut: window too narrow");

  auto w_pre = [&](int i) { return c.us[static_cast<std::size_t>(i)] * c.us[static_cast<std::size_t>(i)]; };

  const double u_att_l = c.us[static_cast<std::size_t>(e_lo)];
  const double u_att_r = c.us[static_cast<std::size_t>(e_hi)];
  const int half = (K - 1) / 2;

  // Cap of span k cells descending from the cut edge into the removed tube:
  // w_cap(x) = w_pre(x) * (1 - s^2). The modulation keeps u_post <= u_pre
  // pointwise and the attachment C^1 in w. On flat necks the best cap is a
  // hemisphere (span ~ u_att); on collapsing shoulders shorter caps keep the
  // tip cool, so the span is picked by minimizing the cap's max curvature.
  auto build_outer = [&](int ka) {
    ProfileCurve piece;
    piece.n = c.n;
    piece.dx = dx;
    piece.x0 = c.x0;
    piece.left = c.left;
    piece.right = EndKind::OnAxis;
    piece.us.assign(c.us.begin(), c.us.begin() + e_lo + 1);
    for (int k = 1; k <= ka; ++k) {
      const double sfrac = static_cast<double>(k) / ka;
      const double w = w_pre(e_lo + k) * (1.0 - sfrac * sfrac);
      piece.us.push_back(k == ka ? 0.0 : std::sqrt(std::max(w, 0.0)));
    }
    return piece;
  };
  auto build_inner = [&](int kb) {
    ProfileCurve piece;
    piece.n = c.n;
    piece.dx = dx;
    piece.x0 = c.x(static_cast<std::size_t>(e_hi - kb));
    piece.left = EndKind::OnAxis;
    piece.right = c.right;
    for (int j = 0; j < kb; ++j) {
      const double sfrac = static_cast<double>(kb - j) / kb;
      const double w = w_pre(e_hi - kb + j) * (1.0 - sfrac * sfrac);
      piece.us.push_back(j == 0 ? 0.0 : std::sqrt(std::max(w, 0.0)));
    }
    piece.us.insert(piece.us.end(), c.us.begin() + e_hi, c.us.end());
    return piece;
  };
  auto cap_max_mean = [&](const ProfileCurve& piece, int span, bool cap_on_right) {
    const auto mean = mean_curvatures(piece);
    const int m = static_cast<int>(mean.size());
    double mx = 0.0;
    for (int i = 0; i < m; ++i) {
      const int dist = cap_on_right ? m - 1 - i : i;
      if (dist <= span + 3) mx = std::max(mx, mean[static_cast<std::size_t>(i)]);
    }
    return mx;
  };
  auto pick_span = [&](double u_att, const std::function<ProfileCurve(int)>& build,
                       bool cap_on_right, ProfileCurve* best_piece) {
    const double base = std::min(u_att, 2.0 * cut.r_z0) / dx;
    int best_k = -1;
    double best_mx = 0.0;
    int prev = -1;
    for (double frac : {0.35, 0.5, 0.7, 1.0, 1.4}) {
      const int k = std::clamp(static_cast<int>(frac * base), 2, half);
      if (k == prev) continue;
      prev = k;
      ProfileCurve piece = build(k);
      if (piece.us.size() < 5) continue;
      const double mx = cap_max_mean(piece, k, cap_on_right);
      if (best_k < 0 || mx < best_mx) {
        best_k = k;
        best_mx = mx;
        *best_piece = std::move(piece);
      }
    }
    if (best_k < 0) throw WindowOutOfRange("apply_cut: cut leaves a degenerate piece");
    return best_mx;
  };

  ProfileCurve left_piece, right_piece;
  const double left_cap_max = pick_span(u_att_l, build_outer, true, &left_piece);
  const double right_cap_max = pick_span(u_att_r, build_inner, false, &right_piece);
  const int ka = static_cast<int>(left_piece.us.size()) - (e_lo + 1);
  const int kb = static_cast<int>(right_piece.us.size()) -
                 (static_cast<int>(c.us.size()) - e_hi);

  if (left_piece.us.size() < 5 || right_piece.us.size() < 5)
    throw WindowOutOfRange("apply_cut: cut leaves a degenerate piece");
  left_piece.validate();
  right_piece.validate();

  // The survivor-side cap must respect the post-surgery curvature bound;
  // the inward piece is bound for discarding and is only constrained
  // from below.
  const double survivor_cap_max = cut.side > 0 ? left_cap_max : right_cap_max;
  if (survivor_cap_max > cfg.omega2 * cfg.H * (1.0 + 1e-9))
    throw CapCurvatureExceeded("apply_cut: cap mean curvature " + std::to_string(survivor_cap_max) +
                               " above omega2*H = " + std::to_string(cfg.omega2 * cfg.H));

  if (caps_out) {
    caps_out->push_back(CapInfo{c.x(static_cast<std::size_t>(e_lo)), u_att_l, ka * dx, +1});
    caps_out->push_back(CapInfo{c.x(static_cast<std::size_t>(e_hi)), u_att_r, kb * dx, -1});
  }

  DomainSlice out;
  out.time = s.time;
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    if (static_cast<int>(k) == ci) {
      out.components.push_back(std::move(left_piece));
      out.components.push_back(std::move(right_piece));
    } else {
      out.components.push_back(s.components[k]);
    }
  }
  return out;
}

DomainSlice standard_surgery(const DomainSlice& s, double z0, double r_z0, int side,
                             const SurgeryConfig& cfg) {
  cfg.validate();
  CutSlice cut;
  cut.z0 = z0;
  cut.r_z0 = r_z0;
  cut.side = side;
  cut.win_lo = z0 - 3.0 * cfg.lambda * r_z0;
  cut.win_hi = z0 + 3.0 * cfg.lambda * r_z0;
  cut.lambda_eff = cfg.lambda;
  return apply_cut(s, cut, cfg, nullptr);
}

DiscardResult discard_components(const DomainSlice& s, const SurgeryConfig& cfg) {
  cfg.validate();
  DiscardResult res;
  res.kept.time = s.time;
  for (const auto& c : s.components) {
    const auto samples = curvature_profile(c);
    double min_mean = std::numeric_limits<double>::infinity();
    for (const auto& smp : samples) min_mean = std::min(min_mean, smp.mean);
    if (min_mean >= 0.5 * cfg.H1()) {
      DiscardedComponent d;
      d.curve = c;
      d.topology = (c.left == EndKind::OnAxis && c.right == EndKind::OnAxis) ? "SPHERE_LIKE"
                                                                             : "UNSUPPORTED";
      d.min_mean = min_mean;
      d.inradius = inradius_estimate(c);
      res.discarded.push_back(std::move(d));
    } else {
      res.kept.components.push_back(c);
    }
  }
  return res;
}

std::pair<FlowState, SurgeryEvent> perform_surgery(const FlowState& state,
                                                   const SurgeryConfig& cfg) {
  cfg.validate();
  if (state.surgeries_done >= cfg.max_surgeries)
    throw SurgeryCapExceeded("perform_surgery: surgery cap reached");
  SurgeryEvent ev;
  ev.time = state.time;
  ev.pre_slice = state.slice();
  ev.pre_slice.time = state.time;

  auto regions = find_high_curvature_regions(ev.pre_slice, cfg);
  std::vector<CutSlice> all_cuts;
  for (auto& reg : regions) {
    auto cuts = locate_surgery_slice(reg, ev.pre_slice, cfg);
    if (reg.whole_region || reg.boundary_count == 0) {
      // Discard-only region: admissible only when it spans its whole component.
      const auto mean =
          mean_curvatures(ev.pre_slice.components[static_cast<std::size_t>(reg.component)]);
      double min_mean = std::numeric_limits<double>::infinity();
      for (double m : mean) min_mean = std::min(min_mean, m);
      if (min_mean < 0.5 * cfg.H1())
        throw SurgeryInfeasible(
            "perform_surgery: region admits no cut window and its component is not "
            "discardable");
      continue;
    }
    all_cuts.insert(all_cuts.end(), cuts.begin(), cuts.end());
  }

  // The solid tubes of distinct surgeries must be disjoint.
  std::sort(all_cuts.begin(), all_cuts.end(),
            [](const CutSlice& a, const CutSlice& b) { return a.win_lo < b.win_lo; });
  for (std::size_t i = 0; i + 1 < all_cuts.size(); ++i) {
    if (all_cuts[i].win_hi >= all_cuts[i + 1].win_lo)
      throw SurgeryInfeasible("perform_surgery: overlapping cut windows");
  }

  DomainSlice working = ev.pre_slice;
  for (const auto& cut : all_cuts) {
    working = apply_cut(working, cut, cfg, &ev.caps);
    ev.cuts.push_back({cut.win_lo, cut.win_hi});
  }
  ev.standard_surgeries = static_cast<int>(all_cuts.size());

  DiscardResult dres = discard_components(working, cfg);
  ev.post_slice = dres.kept;
  ev.post_slice.time = state.time;
  ev.discarded = std::move(dres.discarded);
  ev.regions = std::move(regions);

  double post_max = 0.0;
  for (const auto& c : ev.post_slice.components) {
    for (double m : mean_curvatures(c)) post_max = std::max(post_max, m);
  }
  ev.post_max_mean = post_max;
  if (post_max > cfg.omega2 * cfg.H * (1.0 + 1e-9))
    throw CapCurvatureExceeded("perform_surgery: post-surgery curvature above omega2*H");

  FlowState next;
  if (!ev.post_slice.components.empty()) next = make_flow_state(ev.post_slice);
  next.time = state.time;
  next.surgeries_done = state.surgeries_done + 1;
  next.dt_last = state.dt_last;
  return {std::move(next), std::move(ev)};
}

}  // namespace mcfs
