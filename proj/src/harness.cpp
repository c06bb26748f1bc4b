#include "mcfs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace mcfs {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_h(double H) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", H);
  return buf;
}

double quintic_smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 3) throw BadConfig("config: n must be >= 3");
  if (!(dx > 0.0)) throw BadConfig("config: dx must be positive");
  surgery.validate();
  if (!(epsilon > 0.0)) throw BadConfig("config: epsilon must be positive");
  for (std::size_t i = 0; i + 1 < h_sweep.size(); ++i) {
    if (!(h_sweep[i] < h_sweep[i + 1]))
      throw BadConfig("config: H sweep must be strictly increasing");
  }
  if (std::holds_alternative<SphereSpec>(initial)) {
    if (!(std::get<SphereSpec>(initial).radius > 0.0)) throw BadConfig("config: sphere radius");
  } else if (std::holds_alternative<CappedCylinderSpec>(initial)) {
    const auto& c = std::get<CappedCylinderSpec>(initial);
    if (!(c.radius > 0.0 && c.half_length > 0.0)) throw BadConfig("config: cylinder lengths");
  } else {
    const auto& d = std::get<DumbbellSpec>(initial);
    if (!(d.r_bell > 0.0 && d.r_neck > 0.0 && d.l_neck > 0.0 && d.smoothing > 0.0))
      throw BadConfig("config: dumbbell lengths");
    if (!(d.r_neck < d.r_bell)) throw BadConfig("config: neck must be thinner than bells");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::map<std::string, std::map<std::string, std::string>> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw BadConfig("config: malformed section: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw BadConfig("config: expected key = value: " + line);
    kv[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
    auto s = kv.find(sec);
    if (s == kv.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  };
  auto getd = [&](const std::string& sec, const std::string& key, double* out) {
    if (const std::string* v = get(sec, key)) *out = std::stod(*v);
  };
  auto geti = [&](const std::string& sec, const std::string& key, int* out) {
    if (const std::string* v = get(sec, key)) *out = std::stoi(*v);
  };
  auto getb = [&](const std::string& sec, const std::string& key, bool* out) {
    if (const std::string* v = get(sec, key)) {
      if (*v == "true" || *v == "1") *out = true;
      else if (*v == "false" || *v == "0") *out = false;
      else throw BadConfig("config: boolean expected for " + key);
    }
  };

  if (const std::string* kind = get("initial", "kind")) {
    if (*kind == "sphere") {
      SphereSpec sp;
      getd("initial", "radius", &sp.radius);
      cfg.initial = sp;
    } else if (*kind == "cylinder_capped") {
      CappedCylinderSpec cy;
      getd("initial", "radius", &cy.radius);
      getd("initial", "half_length", &cy.half_length);
      cfg.initial = cy;
    } else if (*kind == "dumbbell") {
      DumbbellSpec db;
      getd("initial", "r_bell", &db.r_bell);
      getd("initial", "r_neck", &db.r_neck);
      getd("initial", "l_neck", &db.l_neck);
      getd("initial", "smoothing", &db.smoothing);
      cfg.initial = db;
    } else {
      throw BadConfig("config: unknown initial kind: " + *kind);
    }
  } else if (kv.count("initial")) {
    DumbbellSpec db;
    getd("initial", "r_bell", &db.r_bell);
    getd("initial", "r_neck", &db.r_neck);
    getd("initial", "l_neck", &db.l_neck);
    getd("initial", "smoothing", &db.smoothing);
    cfg.initial = db;
  }
  geti("flow", "n", &cfg.n);
  getd("flow", "dx", &cfg.dx);
  getd("surgery", "h", &cfg.surgery.H);
  getd("surgery", "omega1", &cfg.surgery.omega1);
  getd("surgery", "omega2", &cfg.surgery.omega2);
  getd("surgery", "lambda", &cfg.surgery.lambda);
  geti("surgery", "max_surgeries", &cfg.surgery.max_surgeries);
  if (const std::string* hs = get("sweep", "h_values")) {
    cfg.h_sweep.clear();
    std::string tmp = *hs;
    std::replace(tmp.begin(), tmp.end(), ',', ' ');
    std::istringstream iss(tmp);
    double v;
    while (iss >> v) cfg.h_sweep.push_back(v);
  }
  getd("barrier", "epsilon", &cfg.epsilon);
  if (const std::string* d = get("output", "dir")) cfg.out_dir = *d;
  getb("output", "svg", &cfg.svg);
  if (const std::string* t = get("output", "timing")) {
    if (*t == "wall") cfg.wall_timing = true;
    else if (*t == "none") cfg.wall_timing = false;
    else throw BadConfig("config: timing must be wall or none");
  }
  cfg.validate();
  return cfg;
}

std::string config_to_string(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[initial]\n";
  if (std::holds_alternative<SphereSpec>(cfg.initial)) {
    os << "kind = sphere\nradius = " << fmt9(std::get<SphereSpec>(cfg.initial).radius) << "\n";
  } else if (std::holds_alternative<CappedCylinderSpec>(cfg.initial)) {
    const auto& c = std::get<CappedCylinderSpec>(cfg.initial);
    os << "kind = cylinder_capped\nradius = " << fmt9(c.radius)
       << "\nhalf_length = " << fmt9(c.half_length) << "\n";
  } else {
    const auto& d = std::get<DumbbellSpec>(cfg.initial);
    os << "kind = dumbbell\nr_bell = " << fmt9(d.r_bell) << "\nr_neck = " << fmt9(d.r_neck)
       << "\nl_neck = " << fmt9(d.l_neck) << "\nsmoothing = " << fmt9(d.smoothing) << "\n";
  }
  os << "\n[flow]\nn = " << cfg.n << "\ndx = " << fmt9(cfg.dx) << "\n";
  os << "\n[surgery]\nh = " << fmt9(cfg.surgery.H) << "\nomega1 = " << fmt9(cfg.surgery.omega1)
     << "\nomega2 = " << fmt9(cfg.surgery.omega2) << "\nlambda = " << fmt9(cfg.surgery.lambda)
     << "\nmax_surgeries = " << cfg.surgery.max_surgeries << "\n";
  os << "\n[sweep]\nh_values =";
  for (double h : cfg.h_sweep) os << " " << fmt9(h);
  os << "\n\n[barrier]\nepsilon = " << fmt9(cfg.epsilon) << "\n";
  os << "\n[output]\ndir = " << cfg.out_dir << "\nsvg = " << (cfg.svg ? "true" : "false")
     << "\ntiming = " << (cfg.wall_timing ? "wall" : "none") << "\n";
  return os.str();
}

namespace {

struct BlendGeometry {
  bool catenary = false;
  double lambda = 0.0, m = 0.0, u_j = 0.0, x_j = 0.0, x_c = 0.0, pole = 0.0;
  double width = 0.0;  // smoothstep fallback
};

// Sub-catenary bell blend: u = r_n cosh(lambda (x-L)/r_n) climbs from the
// cylinder and meets the sphere flank with matched value and slope. Profiles
// of this family satisfy u u'' <= 1 + u'^2 with margin (1-lambda^2)/r_n.
BlendGeometry solve_blend(double R, double r_n, double L, double smoothing) {
  auto geom_at = [&](double lam) {
    BlendGeometry g;
    g.catenary = true;
    g.lambda = lam;
    const double l2 = lam * lam;
    const double q =
        0.5 * (-(1.0 + l2) + std::sqrt((1.0 - l2) * (1.0 - l2) + 4.0 * R * R * l2 / (r_n * r_n)));
    g.m = std::sqrt(std::max(q, 0.0));
    g.u_j = R / std::sqrt(1.0 + q);
    const double xi = (r_n / lam) * std::asinh(g.m / lam);
    g.x_j = L + xi;
    g.x_c = g.x_j + g.m * g.u_j;
    g.pole = g.x_c + R;
    return g;
  };
  auto xi_of = [&](double lam) { return geom_at(lam).x_j - L; };
  const double lam_hi = 0.98, lam_lo = 0.2;
  if (smoothing > xi_of(lam_hi) && smoothing < xi_of(lam_lo)) {
    double lo = lam_lo, hi = lam_hi;  // xi decreases in lambda
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (xi_of(mid) > smoothing ? lo : hi) = mid;
    }
    return geom_at(0.5 * (lo + hi));
  }
  // Requested blend width not achievable by the catenary family: fall back to
  // a smoothstep ramp in w of exactly that width (validation decides fate).
  BlendGeometry g;
  g.catenary = false;
  g.x_c = L + std::sqrt(std::max(R * R - r_n * r_n, 0.0));
  g.width = std::min(smoothing, 0.95 * (g.x_c - L));
  g.pole = g.x_c + R;
  g.x_j = L + g.width;
  return g;
}

double blend_u(const BlendGeometry& g, double R, double r_n, double L, double x) {
  if (x <= L) return r_n;
  if (g.catenary) {
    if (x <= g.x_j) return r_n * std::cosh(g.lambda * (x - L) / r_n);
    return std::sqrt(std::max(R * R - (x - g.x_c) * (x - g.x_c), 0.0));
  }
  const double ws = R * R - (x - g.x_c) * (x - g.x_c);
  if (x >= g.x_j) return std::sqrt(std::max(ws, 0.0));
  const double s = quintic_smoothstep((x - L) / g.width);
  const double w = r_n * r_n + (ws - r_n * r_n) * s;
  return std::sqrt(std::max(w, 0.0));
}

}  // namespace

ProfileCurve build_dumbbell_profile(int n, double dx, double r_bell_left, double r_bell_right,
                                    double r_neck, double l_neck, double smoothing) {
  if (!(r_neck < r_bell_left && r_neck < r_bell_right))
    throw BadConfig("dumbbell: neck must be thinner than both bells");
  const BlendGeometry gr = solve_blend(r_bell_right, r_neck, l_neck, smoothing);
  const BlendGeometry gl = solve_blend(r_bell_left, r_neck, l_neck, smoothing);
  const double span = gl.pole + gr.pole;
  const int N = static_cast<int>(std::lround(span / dx));
  if (N < 16) throw BadConfig("dumbbell: dx too coarse for the geometry");
  const double dxp = span / N;
  ProfileCurve c;
  c.n = n;
  c.x0 = -gl.pole;
  c.dx = dxp;
  c.left = EndKind::OnAxis;
  c.right = EndKind::OnAxis;
  c.us.resize(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) {
    const double x = c.x0 + dxp * i;
    const double u = x >= 0.0 ? blend_u(gr, r_bell_right, r_neck, l_neck, x)
                              : blend_u(gl, r_bell_left, r_neck, l_neck, -x);
    c.us[static_cast<std::size_t>(i)] = u;
  }
  c.us.front() = 0.0;
  c.us.back() = 0.0;
  c.validate();
  return c;
}

DomainSlice build_initial(const InitialSpec& spec, int n, double dx) {
  ProfileCurve c;
  if (std::holds_alternative<SphereSpec>(spec)) {
    const double R = std::get<SphereSpec>(spec).radius;
    const int N = static_cast<int>(std::lround(2.0 * R / dx));
    if (N < 8) throw BadConfig("build_initial: sphere too small for dx");
    const double dxp = 2.0 * R / N;
    c.n = n;
    c.x0 = -R;
    c.dx = dxp;
    c.us.resize(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
      const double x = -R + dxp * i;
      c.us[static_cast<std::size_t>(i)] = std::sqrt(std::max(R * R - x * x, 0.0));
    }
    c.us.front() = 0.0;
    c.us.back() = 0.0;
  } else if (std::holds_alternative<CappedCylinderSpec>(spec)) {
    const auto& cy = std::get<CappedCylinderSpec>(spec);
    const double X = cy.half_length + cy.radius;
    const int N = static_cast<int>(std::lround(2.0 * X / dx));
    if (N < 8) throw BadConfig("build_initial: cylinder too small for dx");
    const double dxp = 2.0 * X / N;
    c.n = n;
    c.x0 = -X;
    c.dx = dxp;
    c.us.resize(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
      const double x = -X + dxp * i;
      const double over = std::max(std::fabs(x) - cy.half_length, 0.0);
      c.us[static_cast<std::size_t>(i)] =
          std::sqrt(std::max(cy.radius * cy.radius - over * over, 0.0));
    }
    c.us.front() = 0.0;
    c.us.back() = 0.0;
  } else {
    const auto& db = std::get<DumbbellSpec>(spec);
    c = build_dumbbell_profile(n, dx, db.r_bell, db.r_bell, db.r_neck, db.l_neck, db.smoothing);
  }
  c.validate();
  const TwoConvexity tc = is_two_convex(c);
  if (!tc.two_convex) {
    throw NotTwoConvex("build_initial: profile fails two-convexity at node " +
                       std::to_string(tc.argmin) + " (x = " + fmt9(c.x(tc.argmin)) +
                       ", margin = " + fmt9(tc.margin) + ")");
  }
  DomainSlice s;
  s.time = 0.0;
  s.components.push_back(std::move(c));
  return s;
}

namespace {

double slice_max_u(const DomainSlice& s) {
  double m = 0.0;
  for (const auto& c : s.components) m = std::max(m, c.max_u());
  return m;
}

}  // namespace

GridSpec lsf_grid_for(const DomainSlice& s, double dx) {
  double x_min = 1e300, x_max = -1e300;
  for (const auto& c : s.components) {
    x_min = std::min(x_min, c.x_min());
    x_max = std::max(x_max, c.x_max());
  }
  const double margin = std::max(16.0 * dx, 0.08);
  GridSpec g;
  g.dx = dx;
  g.x_lo = x_min - margin;
  g.x_hi = x_max + margin;
  g.r_hi = slice_max_u(s) + margin;
  return g;
}

RunResult run_surgery_flow(const ExperimentConfig& cfg, double H) {
  cfg.validate();
  DomainSlice s0 = build_initial(cfg.initial, cfg.n, cfg.dx);
  FlowState state = make_flow_state(s0);
  if (H * cfg.surgery.omega2 < state.max_mean_curvature)
    throw BadConfig("run_surgery_flow: H must be at least (initial max mean curvature)/omega2");
  SurgeryConfig scfg = cfg.surgery;
  scfg.H = H;
  scfg.validate();
  const double u_max = slice_max_u(s0);
  const double t_hint = 1.3 * u_max * u_max / (2.0 * (cfg.n - 1));
  const double t_budget = 2.5 * t_hint;

  RunResult res;
  res.track.provenance = Provenance::SurgeryFlow;
  res.track.surgery_h = H;
  TrackRecorder rec{&res.track, t_hint / 2000.0, 0.0};
  rec.force(TrackSlice{0.0, s0, {}, static_cast<int>(s0.components.size())});

  for (;;) {
    auto [st, reason] = evolve_until(std::move(state), H, t_budget, &rec);
    state = std::move(st);
    if (reason == StopReason::ReachedH) {
      auto [post, ev] = perform_surgery(state, scfg);
      res.events.push_back(ev);
      res.track.events.push_back(std::move(ev));
      const double tb = state.time + 1e-12 * (1.0 + std::fabs(state.time));
      rec.force(TrackSlice{tb, post.slice(), {}, static_cast<int>(post.fields.size())});
      state = std::move(post);
      if (state.extinct()) {
        res.track.closure = TrackClosure::Extinct;
        break;
      }
      continue;
    }
    if (reason == StopReason::Extinct) {
      res.track.closure = TrackClosure::Extinct;
      break;
    }
    if (reason == StopReason::ReachedTEnd) {
      res.track.closure = TrackClosure::Horizon;
      break;
    }
    throw FlowStalled("run_surgery_flow: time step underflow at t = " + fmt9(state.time));
  }
  return res;
}

SpaceTimeTrack run_level_set(const ExperimentConfig& cfg) {
  cfg.validate();
  DomainSlice s0 = build_initial(cfg.initial, cfg.n, cfg.dx);
  const GridSpec grid = lsf_grid_for(s0, cfg.dx);
  LevelSetField f = signed_distance_init(s0, grid);
  const double u_max = slice_max_u(s0);
  const double t_hint = 1.3 * u_max * u_max / (2.0 * (cfg.n - 1));
  SpaceTimeTrack track;
  track.provenance = Provenance::LevelSet;
  TrackRecorder rec{&track, t_hint / 2000.0, 0.0};
  LsfRunOptions opts;
  const LevelSetField final_f = evolve_lsf(f, 2.5 * t_hint, &rec, opts);
  track.closure = has_zero_set(final_f) ? TrackClosure::Horizon : TrackClosure::Extinct;
  return track;
}

SweepResult convergence_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.h_sweep.empty()) throw BadConfig("convergence_sweep: empty H sweep");
  DomainSlice s0 = build_initial(cfg.initial, cfg.n, cfg.dx);

  SweepResult out;
  out.lsf_track = run_level_set(cfg);
  out.report.grid = lsf_grid_for(s0, cfg.dx);
  out.report.t_epsilon = compute_t_epsilon(s0, cfg.epsilon, out.report.grid);
  out.omega_track = shift_track(out.lsf_track, out.report.t_epsilon);
  out.report.h0 = h0_threshold(cfg.epsilon, cfg.surgery, cfg.n);

  fs::create_directories(cfg.out_dir);
  write_track(out.lsf_track, (fs::path(cfg.out_dir) / "lsf_track.txt").string());

  for (double H : cfg.h_sweep) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult run = run_surgery_flow(cfg, H);
    const double dh = hausdorff_distance(run.track, out.lsf_track, cfg.dx).hausdorff;
    ReportRow row;
    row.H = H;
    row.hausdorff = dh;
    for (const auto& ev : run.events) {
      row.surgeries += ev.standard_surgeries;
      row.discards += static_cast<int>(ev.discarded.size());
    }
    row.containment_required = H >= out.report.h0 * (1.0 - 1e-12);
    row.contained = contains_track(out.omega_track, run.track, 2.0 * cfg.dx).contained;
    const auto t1 = std::chrono::steady_clock::now();
    row.seconds = cfg.wall_timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    out.report.rows.push_back(row);

    write_track(run.track,
                (fs::path(cfg.out_dir) / ("surgery_track_H" + fmt_h(H) + ".txt")).string());
    write_events_json(cfg, H, run.events,
                      (fs::path(cfg.out_dir) / ("events_H" + fmt_h(H) + ".json")).string());
    out.runs.push_back(std::move(run));
    write_report(cfg, out.report, cfg.out_dir);  // partial flush after each row
  }
  emit_outputs(cfg, out);
  return out;
}

void write_track(const SpaceTimeTrack& track, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write track file: " + path);
  for (const auto& s : track.slices) {
    os << "# time=" << fmt9(s.time) << "\n";
    if (s.profile.has_value()) {
      for (std::size_t ci = 0; ci < s.profile->components.size(); ++ci) {
        const auto& c = s.profile->components[ci];
        for (std::size_t i = 0; i < c.us.size(); ++i) {
          os << ci << " " << fmt9(c.x(i)) << " " << fmt9(c.us[i]) << "\n";
        }
      }
    } else {
      for (const auto& p : s.contour) os << 0 << " " << fmt9(p.x) << " " << fmt9(p.r) << "\n";
    }
  }
  if (!os) throw IoError("failed writing track file: " + path);
}

SpaceTimeTrack read_track(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open track file: " + path);
  SpaceTimeTrack track;
  track.provenance = Provenance::LevelSet;
  TrackSlice cur;
  bool have = false;
  int max_id = -1;
  std::string line;
  auto flush = [&]() {
    if (!have) return;
    cur.component_count = cur.contour.empty() ? 0 : max_id + 1;
    track.add_slice(std::move(cur));
    cur = TrackSlice{};
    max_id = -1;
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("# time=", 0) == 0) {
      flush();
      cur.time = std::stod(line.substr(7));
      have = true;
      continue;
    }
    std::istringstream iss(line);
    int id;
    double x, r;
    if (iss >> id >> x >> r) {
      cur.contour.push_back(Vec2{x, r});
      max_id = std::max(max_id, id);
    }
  }
  flush();
  return track;
}

namespace {

const char* end_kind_name(EndKind k) { return k == EndKind::OnAxis ? "axis" : "open"; }

EndKind end_kind_from(const std::string& s) {
  if (s == "axis") return EndKind::OnAxis;
  if (s == "open") return EndKind::Open;
  throw IoError("unknown end kind: " + s);
}

ordered_json curve_to_json(const ProfileCurve& c) {
  ordered_json j;
  j["n"] = c.n;
  j["x0"] = c.x0;
  j["dx"] = c.dx;
  j["left"] = end_kind_name(c.left);
  j["right"] = end_kind_name(c.right);
  j["us"] = c.us;
  return j;
}

ProfileCurve curve_from_json(const ordered_json& j) {
  ProfileCurve c;
  c.n = j.at("n").get<int>();
  c.x0 = j.at("x0").get<double>();
  c.dx = j.at("dx").get<double>();
  c.left = end_kind_from(j.at("left").get<std::string>());
  c.right = end_kind_from(j.at("right").get<std::string>());
  c.us = j.at("us").get<std::vector<double>>();
  return c;
}

ordered_json slice_to_json(const DomainSlice& s) {
  ordered_json j;
  j["time"] = s.time;
  j["components"] = ordered_json::array();
  for (const auto& c : s.components) j["components"].push_back(curve_to_json(c));
  return j;
}

DomainSlice slice_from_json(const ordered_json& j) {
  DomainSlice s;
  s.time = j.at("time").get<double>();
  for (const auto& cj : j.at("components")) s.components.push_back(curve_from_json(cj));
  return s;
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  if (std::holds_alternative<SphereSpec>(cfg.initial)) {
    j["initial"] = {{"kind", "sphere"}, {"radius", std::get<SphereSpec>(cfg.initial).radius}};
  } else if (std::holds_alternative<CappedCylinderSpec>(cfg.initial)) {
    const auto& c = std::get<CappedCylinderSpec>(cfg.initial);
    j["initial"] = {{"kind", "cylinder_capped"}, {"radius", c.radius},
                    {"half_length", c.half_length}};
  } else {
    const auto& d = std::get<DumbbellSpec>(cfg.initial);
    j["initial"] = {{"kind", "dumbbell"}, {"r_bell", d.r_bell}, {"r_neck", d.r_neck},
                    {"l_neck", d.l_neck}, {"smoothing", d.smoothing}};
  }
  j["n"] = cfg.n;
  j["dx"] = cfg.dx;
  j["surgery"] = {{"omega1", cfg.surgery.omega1}, {"omega2", cfg.surgery.omega2},
                  {"lambda", cfg.surgery.lambda}, {"max_surgeries", cfg.surgery.max_surgeries}};
  j["h_sweep"] = cfg.h_sweep;
  j["epsilon"] = cfg.epsilon;
  return j;
}

}  // namespace

void write_events_json(const ExperimentConfig& cfg, double H,
                       const std::vector<SurgeryEvent>& events, const std::string& path) {
  ordered_json root;
  root["version"] = kVersion;
  root["H"] = H;
  root["n"] = cfg.n;
  root["dx"] = cfg.dx;
  root["omega1"] = cfg.surgery.omega1;
  root["omega2"] = cfg.surgery.omega2;
  root["lambda"] = cfg.surgery.lambda;
  root["events"] = ordered_json::array();
  for (const auto& ev : events) {
    ordered_json ej;
    ej["time"] = ev.time;
    ej["standard_surgeries"] = ev.standard_surgeries;
    ej["post_max_mean"] = ev.post_max_mean;
    ej["regions"] = ordered_json::array();
    for (const auto& r : ev.regions) {
      ordered_json rj;
      rj["component"] = r.component;
      rj["a"] = r.a;
      rj["b"] = r.b;
      rj["boundary_count"] = r.boundary_count;
      rj["whole_region"] = r.whole_region;
      rj["max_mean"] = r.max_mean;
      rj["slices"] = ordered_json::array();
      for (const auto& cs : r.slices) {
        rj["slices"].push_back({{"z0", cs.z0},
                                {"r_z0", cs.r_z0},
                                {"side", cs.side},
                                {"win_lo", cs.win_lo},
                                {"win_hi", cs.win_hi},
                                {"lambda_eff", cs.lambda_eff}});
      }
      ej["regions"].push_back(std::move(rj));
    }
    ej["cuts"] = ordered_json::array();
    for (const auto& cut : ev.cuts) ej["cuts"].push_back({cut[0], cut[1]});
    ej["caps"] = ordered_json::array();
    for (const auto& cap : ev.caps) {
      ej["caps"].push_back({{"attach_x", cap.attach_x},
                            {"radius", cap.radius},
                            {"axial", cap.axial},
                            {"dir", cap.dir}});
    }
    ej["discarded"] = ordered_json::array();
    for (const auto& d : ev.discarded) {
      ej["discarded"].push_back({{"topology", d.topology},
                                 {"min_H", d.min_mean},
                                 {"inradius", d.inradius},
                                 {"component", curve_to_json(d.curve)}});
    }
    ej["pre_slice"] = slice_to_json(ev.pre_slice);
    ej["post_slice"] = slice_to_json(ev.post_slice);
    root["events"].push_back(std::move(ej));
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot write events file: " + path);
  os << root.dump(1) << "\n";
  if (!os) throw IoError("failed writing events file: " + path);
}

void write_report(const ExperimentConfig& cfg, const ConvergenceReport& rep,
                  const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream os(fs::path(dir) / "report.csv");
    if (!os) throw IoError("cannot write report.csv");
    os << "H,surgeries,discards,hausdorff,containment,seconds\n";
    for (const auto& r : rep.rows) {
      os << fmt9(r.H) << "," << r.surgeries << "," << r.discards << "," << fmt9(r.hausdorff)
         << "," << (r.contained ? "true" : "false") << "," << fmt9(r.seconds) << "\n";
    }
  }
  ordered_json j;
  j["version"] = kVersion;
  j["config"] = config_to_json(cfg);
  j["grid"] = {{"x_lo", rep.grid.x_lo},
               {"x_hi", rep.grid.x_hi},
               {"r_hi", rep.grid.r_hi},
               {"dx", rep.grid.dx}};
  j["t_epsilon"] = rep.t_epsilon;
  j["h0_threshold"] = rep.h0;
  j["rows"] = ordered_json::array();
  for (const auto& r : rep.rows) {
    j["rows"].push_back({{"H", r.H},
                         {"surgeries", r.surgeries},
                         {"discards", r.discards},
                         {"hausdorff", r.hausdorff},
                         {"containment_required", r.containment_required},
                         {"containment", r.contained},
                         {"seconds", r.seconds}});
  }
  std::ofstream os(fs::path(dir) / "report.json");
  if (!os) throw IoError("cannot write report.json");
  os << j.dump(1) << "\n";
}

void write_slice_svg(const DomainSlice& s, const std::string& path) {
  double x_min = -1.0, x_max = 1.0, u_max = 0.5;
  if (!s.components.empty()) {
    x_min = 1e300;
    x_max = -1e300;
    u_max = 0.0;
    for (const auto& c : s.components) {
      x_min = std::min(x_min, c.x_min());
      x_max = std::max(x_max, c.x_max());
      u_max = std::max(u_max, c.max_u());
    }
  }
  const double pad = 0.1 * std::max(x_max - x_min, 2.0 * u_max) + 1e-6;
  const double w = (x_max - x_min) + 2 * pad, h = 2.0 * u_max + 2 * pad;
  const double scale = 640.0 / w;
  auto X = [&](double x) { return (x - x_min + pad) * scale; };
  auto Y = [&](double r) { return (u_max + pad - r) * scale; };
  char buf[64];
  std::ofstream os(path);
  if (!os) throw IoError("cannot write svg: " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\""
     << static_cast<int>(h * scale + 0.5) << "\">\n";
  std::snprintf(buf, sizeof buf, "%.2f", Y(0.0));
  os << "<line x1=\"0\" y1=\"" << buf << "\" x2=\"640\" y2=\"" << buf
     << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& c : s.components) {
    for (int mirror = 0; mirror < 2; ++mirror) {
      os << "<path fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"1.5\" d=\"";
      for (std::size_t i = 0; i < c.us.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%c%.3f %.3f", i == 0 ? 'M' : 'L', X(c.x(i)),
                      Y(mirror ? -c.us[i] : c.us[i]));
        os << buf << (i + 1 < c.us.size() ? " " : "");
      }
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
}

void emit_outputs(const ExperimentConfig& cfg, const SweepResult& res) {
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  write_track(res.lsf_track, (dir / "lsf_track.txt").string());
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const double H = res.report.rows[i].H;
    write_track(res.runs[i].track, (dir / ("surgery_track_H" + fmt_h(H) + ".txt")).string());
    write_events_json(cfg, H, res.runs[i].events,
                      (dir / ("events_H" + fmt_h(H) + ".json")).string());
    if (cfg.svg) {
      for (std::size_t e = 0; e < res.runs[i].events.size(); ++e) {
        const auto& ev = res.runs[i].events[e];
        write_slice_svg(ev.pre_slice, (dir / ("snapshot_H" + fmt_h(H) + "_event" +
                                              std::to_string(e + 1) + "_pre.svg")).string());
        write_slice_svg(ev.post_slice, (dir / ("snapshot_H" + fmt_h(H) + "_event" +
                                               std::to_string(e + 1) + "_post.svg")).string());
      }
    }
  }
  if (cfg.svg && !res.runs.empty() && !res.runs.front().track.slices.empty()) {
    const auto& first = res.runs.front().track.slices.front();
    if (first.profile.has_value())
      write_slice_svg(*first.profile, (dir / "snapshot_initial.svg").string());
  }
  write_report(cfg, res.report, cfg.out_dir);
}

EventCheck verify_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open events file: " + path);
  ordered_json root = ordered_json::parse(in);
  const double H = root.at("H").get<double>();
  const double omega1 = root.at("omega1").get<double>();
  const double omega2 = root.at("omega2").get<double>();
  const double dx = root.at("dx").get<double>();
  const int n = root.at("n").get<int>();
  const double H1 = omega1 * H;

  EventCheck chk;
  auto record = [&](double t, const std::string& name, bool ok, const std::string& detail) {
    std::ostringstream os;
    os << "event t=" << fmt9(t) << " " << name << " " << (ok ? "PASS" : "FAIL");
    if (!detail.empty()) os << " (" << detail << ")";
    chk.lines.push_back(os.str());
    if (!ok) ++chk.failures;
  };

  for (const auto& ej : root.at("events")) {
    const double t = ej.at("time").get<double>();
    DomainSlice pre = slice_from_json(ej.at("pre_slice"));
    DomainSlice post = slice_from_json(ej.at("post_slice"));

    // monotone inclusion: u_post <= u_pre at shared abscissae
    bool incl = true;
    for (const auto& pc : post.components) {
      for (std::size_t i = 0; i < pc.us.size() && incl; ++i) {
        const Vec2 p{pc.x(i), pc.us[i]};
        bool covered = false;
        for (const auto& qc : pre.components) {
          if (p.x < qc.x_min() - 1e-9 || p.x > qc.x_max() + 1e-9) continue;
          const double tt = std::clamp((p.x - qc.x0) / qc.dx, 0.0,
                                       static_cast<double>(qc.us.size() - 1));
          const std::size_t j = std::min(static_cast<std::size_t>(tt), qc.us.size() - 2);
          const double frac = tt - static_cast<double>(j);
          const double u_pre = qc.us[j] * (1.0 - frac) + qc.us[j + 1] * frac;
          if (p.r <= u_pre + 1e-7) covered = true;
        }
        incl = covered;
      }
    }
    record(t, "monotone_inclusion", incl, "");

    double post_max = 0.0;
    for (const auto& c : post.components) {
      for (const auto& smp : curvature_profile(c)) post_max = std::max(post_max, smp.mean);
    }
    record(t, "post_curvature_bound", post_max <= omega2 * H * (1.0 + 1e-6),
           "max=" + fmt9(post_max) + " bound=" + fmt9(omega2 * H));

    bool discards_ok = true;
    std::string detail;
    for (const auto& dj : ej.at("discarded")) {
      ProfileCurve c = curve_from_json(dj.at("component"));
      double mn = 1e300;
      for (const auto& smp : curvature_profile(c)) mn = std::min(mn, smp.mean);
      const double inr = inradius_estimate(c);
      if (mn < 0.5 * H1 * (1.0 - 1e-6) || inr > 2.0 * n / H1 + dx) {
        discards_ok = false;
        detail = "min_H=" + fmt9(mn) + " inradius=" + fmt9(inr);
      }
    }
    record(t, "discard_soundness", discards_ok, detail);

    // ball preservation at the lemma scale epsilon = 2n/(omega1 H)
    const double eps = 2.0 * n / (omega1 * H);
    bool balls_ok = true;
    int deep = 0;
    double x_min = 1e300, x_max = -1e300, u_top = 0.0;
    for (const auto& c : pre.components) {
      x_min = std::min(x_min, c.x_min());
      x_max = std::max(x_max, c.x_max());
      u_top = std::max(u_top, c.max_u());
    }
    const bool post_empty = post.components.empty();
    for (double px = x_min; px <= x_max; px += dx) {
      for (double pr = 0.0; pr <= u_top; pr += dx) {
        const double dpre = distance_to_boundary(Vec2{px, pr}, pre);
        if (dpre > -eps) continue;
        ++deep;
        const double dpost =
            post_empty ? 1e300 : distance_to_boundary(Vec2{px, pr}, post);
        if (dpost > -(eps - 2.0 * dx)) {
          balls_ok = false;
        }
      }
    }
    record(t, "ball_preservation", balls_ok,
           "eps=" + fmt9(eps) + " deep_points=" + std::to_string(deep));
  }
  return chk;
}

}  // namespace mcfs
