#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mcfs/flow.hpp"
#include "mcfs/level_set.hpp"
#include "mcfs/spacetime.hpp"
#include "mcfs/surgery.hpp"

namespace mcfs {

inline constexpr const char* kVersion = "0.1.0";

struct SphereSpec {
  double radius = 1.0;
};
struct CappedCylinderSpec {
  double radius = 0.5;
  double half_length = 2.0;
};
struct DumbbellSpec {
  double r_bell = 1.0;
  double r_neck = 0.15;
  double l_neck = 1.0;
  double smoothing = 0.3;
};
using InitialSpec = std::variant<SphereSpec, CappedCylinderSpec, DumbbellSpec>;

struct ExperimentConfig {
  InitialSpec initial = DumbbellSpec{};
  int n = 3;
  double dx = 0.005;
  SurgeryConfig surgery{60.0, 0.5, 0.9, 10.0, 64};
  std::vector<double> h_sweep{60.0, 120.0, 240.0, 480.0};
  double epsilon = 0.1;
  std::string out_dir = "out";
  bool svg = true;
  bool wall_timing = true;  // when false, reports print 0 seconds (reproducible bytes)

  void validate() const;
};

// Flat INI-style key/value document with [sections]; unknown keys rejected.
ExperimentConfig load_config(const std::string& path);
std::string config_to_string(const ExperimentConfig& cfg);

// Smooth two-convex initial data sampled at spacing ~dx with axis poles on
// grid nodes. Throws NotTwoConvex naming the violating node.
DomainSlice build_initial(const InitialSpec& spec, int n, double dx);

// Dumbbell profile with independent bell radii (test geometries).
ProfileCurve build_dumbbell_profile(int n, double dx, double r_bell_left, double r_bell_right,
                                    double r_neck, double l_neck, double smoothing);

struct RunResult {
  SpaceTimeTrack track;
  std::vector<SurgeryEvent> events;
};

// Alternates smooth evolution and surgery until extinction (all components
// discarded or shrunk away). Requires H >= initial max mean curvature / omega2.
RunResult run_surgery_flow(const ExperimentConfig& cfg, double H);

SpaceTimeTrack run_level_set(const ExperimentConfig& cfg);

// Level-set grid used for a given initial slice.
GridSpec lsf_grid_for(const DomainSlice& s, double dx);

struct ReportRow {
  double H = 0.0;
  int surgeries = 0;
  int discards = 0;
  double hausdorff = 0.0;
  bool containment_required = false;
  bool contained = false;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  GridSpec grid;
  double t_epsilon = 0.0;
  double h0 = 0.0;
};

struct SweepResult {
  ConvergenceReport report;
  SpaceTimeTrack lsf_track;    // reference track the sweep converges to
  SpaceTimeTrack omega_track;  // inner barrier (shifted level set flow)
  std::vector<RunResult> runs;
};

// Runs the level set flow once, then every surgery flow in the sweep;
// computes Hausdorff distances and the barrier containment column. Partial
// outputs are flushed to cfg.out_dir after every row.
SweepResult convergence_sweep(const ExperimentConfig& cfg);

// File emitters (deterministic bytes for a fixed config).
void write_track(const SpaceTimeTrack& track, const std::string& path);
SpaceTimeTrack read_track(const std::string& path);
void write_events_json(const ExperimentConfig& cfg, double H,
                       const std::vector<SurgeryEvent>& events, const std::string& path);
void write_report(const ExperimentConfig& cfg, const ConvergenceReport& rep,
                  const std::string& dir);
void write_slice_svg(const DomainSlice& s, const std::string& path);
void emit_outputs(const ExperimentConfig& cfg, const SweepResult& res);

struct EventCheck {
  int failures = 0;
  std::vector<std::string> lines;
};

// Re-checks the surgery-time invariants on a stored event record file.
EventCheck verify_events_file(const std::string& path);

}  // namespace mcfs
