#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcfs/harness.hpp"

namespace fs = std::filesystem;
using mcfs::ExperimentConfig;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  double h = 0.0;
  double dx = 0.0;
  double epsilon = 0.0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config_path, "experiment config file");
  cmd->add_option("--out", f->out_dir, "output directory");
  cmd->add_option("--h", f->h, "surgery parameter H override");
  cmd->add_option("--dx", f->dx, "grid spacing override");
  cmd->add_option("--epsilon", f->epsilon, "barrier epsilon override");
  cmd->add_flag("--quiet", f->quiet, "suppress progress output");
}

ExperimentConfig resolve_config(const CommonFlags& f) {
  ExperimentConfig cfg =
      f.config_path.empty() ? ExperimentConfig{} : mcfs::load_config(f.config_path);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (f.dx > 0.0) cfg.dx = f.dx;
  if (f.epsilon > 0.0) cfg.epsilon = f.epsilon;
  if (f.h > 0.0) {
    cfg.surgery.H = f.h;
    cfg.h_sweep = {f.h};
  }
  cfg.validate();
  return cfg;
}

int run_surgery_cmd(const CommonFlags& f) {
  ExperimentConfig cfg = resolve_config(f);
  const double H = cfg.surgery.H;
  mcfs::RunResult res = mcfs::run_surgery_flow(cfg, H);
  fs::create_directories(cfg.out_dir);
  char hbuf[32];
  std::snprintf(hbuf, sizeof hbuf, "%g", H);
  mcfs::write_track(res.track,
                    (fs::path(cfg.out_dir) / (std::string("surgery_track_H") + hbuf + ".txt")).string());
  mcfs::write_events_json(cfg, H, res.events,
                          (fs::path(cfg.out_dir) / (std::string("events_H") + hbuf + ".json")).string());
  if (cfg.svg) {
    for (std::size_t e = 0; e < res.events.size(); ++e) {
      mcfs::write_slice_svg(res.events[e].pre_slice,
                            (fs::path(cfg.out_dir) /
                             (std::string("snapshot_H") + hbuf + "_event" + std::to_string(e + 1) +
                              "_pre.svg")).string());
      mcfs::write_slice_svg(res.events[e].post_slice,
                            (fs::path(cfg.out_dir) /
                             (std::string("snapshot_H") + hbuf + "_event" + std::to_string(e + 1) +
                              "_post.svg")).string());
    }
  }
  if (!f.quiet) {
    int cuts = 0, discards = 0;
    for (const auto& ev : res.events) {
      cuts += ev.standard_surgeries;
      discards += static_cast<int>(ev.discarded.size());
    }
    std::printf("run-surgery H=%g events=%zu standard_surgeries=%d discards=%d t_end=%.6g %s\n",
                H, res.events.size(), cuts, discards, res.track.t_end(),
                res.track.closure == mcfs::TrackClosure::Extinct ? "extinct" : "horizon");
  }
  return 0;
}

int run_lsf_cmd(const CommonFlags& f) {
  ExperimentConfig cfg = resolve_config(f);
  mcfs::SpaceTimeTrack track = mcfs::run_level_set(cfg);
  fs::create_directories(cfg.out_dir);
  mcfs::write_track(track, (fs::path(cfg.out_dir) / "lsf_track.txt").string());
  if (!f.quiet) {
    std::printf("run-lsf slices=%zu t_end=%.6g %s\n", track.slices.size(), track.t_end(),
                track.closure == mcfs::TrackClosure::Extinct ? "extinct" : "horizon");
  }
  return 0;
}

int sweep_cmd(const CommonFlags& f) {
  ExperimentConfig cfg = resolve_config(f);
  mcfs::SweepResult res = mcfs::convergence_sweep(cfg);
  if (!f.quiet) {
    std::printf("H,surgeries,discards,hausdorff,containment,seconds\n");
    for (const auto& r : res.report.rows) {
      std::printf("%g,%d,%d,%.9g,%s,%.3g\n", r.H, r.surgeries, r.discards, r.hausdorff,
                  r.contained ? "true" : "false", r.seconds);
    }
    std::printf("t_epsilon=%.6g h0=%.6g outputs=%s\n", res.report.t_epsilon, res.report.h0,
                cfg.out_dir.c_str());
  }
  return 0;
}

int verify_events_cmd(const std::vector<std::string>& files, bool quiet) {
  if (files.empty()) throw mcfs::BadConfig("verify-events: no event files given");
  int failures = 0;
  for (const auto& path : files) {
    mcfs::EventCheck chk = mcfs::verify_events_file(path);
    if (!quiet) {
      std::printf("%s:\n", path.c_str());
      for (const auto& line : chk.lines) std::printf("  %s\n", line.c_str());
    }
    failures += chk.failures;
  }
  if (!quiet) std::printf("verify-events failures=%d\n", failures);
  return failures == 0 ? 0 : 2;
}

int distance_cmd(const std::string& a, const std::string& b, const std::string& out,
                 double gap) {
  mcfs::SpaceTimeTrack ta = mcfs::read_track(a);
  mcfs::SpaceTimeTrack tb = mcfs::read_track(b);
  mcfs::DistanceReport rep = mcfs::hausdorff_distance(ta, tb, gap);
  nlohmann::ordered_json j;
  j["hausdorff"] = rep.hausdorff;
  j["directed_ab"] = rep.directed_ab;
  j["directed_ba"] = rep.directed_ba;
  j["witness_a"] = {{"x", rep.witness_a.x}, {"r", rep.witness_a.r}, {"t", rep.witness_a.t}};
  j["witness_b"] = {{"x", rep.witness_b.x}, {"r", rep.witness_b.r}, {"t", rep.witness_b.t}};
  if (out.empty()) {
    std::cout << j.dump(1) << "\n";
  } else {
    std::ofstream os(out);
    if (!os) throw mcfs::IoError("cannot write " + out);
    os << j.dump(1) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axisymmetric mean curvature flow with surgery and level set flow"};
  app.require_subcommand(1);

  CommonFlags fs_run, fs_lsf, fs_sweep;
  auto* c_run = app.add_subcommand("run-surgery", "run one surgery flow");
  add_common(c_run, &fs_run);
  auto* c_lsf = app.add_subcommand("run-lsf", "run the level set flow");
  add_common(c_lsf, &fs_lsf);
  auto* c_sweep = app.add_subcommand("sweep", "H sweep with convergence report");
  add_common(c_sweep, &fs_sweep);

  std::vector<std::string> event_files;
  bool verify_quiet = false;
  auto* c_verify = app.add_subcommand("verify-events", "re-check stored surgery events");
  c_verify->add_option("files", event_files, "events_*.json files")->required();
  c_verify->add_flag("--quiet", verify_quiet, "suppress per-event lines");

  std::string track_a, track_b, dist_out;
  double dist_gap = 0.005;
  auto* c_dist = app.add_subcommand("distance", "Hausdorff distance between two track files");
  c_dist->add_option("track_a", track_a, "first track file")->required();
  c_dist->add_option("track_b", track_b, "second track file")->required();
  c_dist->add_option("--out", dist_out, "write the report to this file");
  c_dist->add_option("--gap", dist_gap, "boundary sampling gap");

  try {
    app.parse(argc, argv);
    if (c_run->parsed()) return run_surgery_cmd(fs_run);
    if (c_lsf->parsed()) return run_lsf_cmd(fs_lsf);
    if (c_sweep->parsed()) return sweep_cmd(fs_sweep);
    if (c_verify->parsed()) return verify_events_cmd(event_files, verify_quiet);
    if (c_dist->parsed()) return distance_cmd(track_a, track_b, dist_out, dist_gap);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const mcfs::BadConfig& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mcfs::MalformedProfile& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mcfs::NotTwoConvex& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mcfs::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
