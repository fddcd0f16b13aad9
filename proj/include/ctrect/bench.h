#pragma once

// Synthetic studies: noiseless stability, noise sensitivity of the best and
// random selection strategies, RANSAC convergence and solver timing. Every
// scene is generated from derive_seed(seed, scene_index), so per-scene
// numbers do not depend on the number of scenes or workers.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ctrect/ransac.h"

namespace ctrect {

// Linear interpolation between order statistics (the numpy default).
double quantile(std::vector<double> values, double q);

struct BoxStats {
  int n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  // Most extreme samples within 1.5 IQR of the box.
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
};
BoxStats box_stats(std::span<const double> values);

const char* solver_name(SolverKind kind);

struct StabilityRow {
  int scene = 0;
  double lambda_gt = 0.0;
  double lambda_hat = 0.0;
  double warp_error = 0.0;  // px, +inf when no model
  double log10_warp = 0.0;  // floored at 1e-16
  bool solved = false;
};
std::vector<StabilityRow> study_stability(int n_scenes, std::uint64_t seed, int workers = 0);
void write_stability_csv(std::ostream& os, std::span<const StabilityRow> rows);

struct SensitivityConfig {
  std::vector<double> sigmas{0.1, 0.5, 1.0, 2.0};
  int n_scenes = 200;
  int iterations = 25;
  double lambda = -4.0;
  int frames = 10;
  std::uint64_t seed = 0;
  int workers = 0;
};

// Long format: one value per (scene, solver, sigma, metric). Metrics are
// warp_error and transfer_error (px), lambda_rel_error and lambda_hat, each
// the minimum over the same hypotheses (per-metric oracle RANSAC; lambda_hat
// is the estimate chosen by the lambda oracle).
struct SensitivityRow {
  int scene = 0;
  SolverKind solver = SolverKind::kBest;
  double sigma = 0.0;
  std::string metric;
  double value = 0.0;
};
struct SensitivitySummary {
  SolverKind solver = SolverKind::kBest;
  double sigma = 0.0;
  std::string metric;
  BoxStats stats;
};
struct SensitivityResult {
  std::vector<SensitivityRow> rows;
  std::vector<SensitivitySummary> summary;

  const SensitivitySummary* find(SolverKind solver, double sigma, const std::string& metric) const;
};
SensitivityResult study_sensitivity(const SensitivityConfig& cfg);
void write_sensitivity_long_csv(std::ostream& os, std::span<const SensitivityRow> rows);
void write_sensitivity_summary_csv(std::ostream& os, std::span<const SensitivitySummary> rows);

struct ConvergenceConfig {
  int n_scenes = 30;
  int iterations = 25;
  double outlier_fraction = 0.5;
  double sigma = 1.0;
  double lambda = -4.0;
  int frames = 10;
  std::uint64_t seed = 0;
  int workers = 0;
};
struct ConvergenceRow {
  int iteration = 0;
  SolverKind solver = SolverKind::kBest;
  // Mean over scenes of the running-best warp error (px), where the identity
  // model (no undistortion, no rectification) is the initial incumbent.
  double mean_warp_error = 0.0;
  // Scenes whose RANSAC has produced no model yet.
  int scenes_without_model = 0;
};
std::vector<ConvergenceRow> study_convergence(const ConvergenceConfig& cfg);
void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows);

struct TimingStats {
  int n = 0;
  double median_us = 0.0;
  double p95_us = 0.0;
  double mean_us = 0.0;
  double stddev_us = 0.0;
};
struct TimingReport {
  TimingStats solve_one;
  TimingStats solve_best;
};
// Times solve_one (cycling through the selections) and solve_best on
// pre-generated noiseless instances; generation is not timed.
TimingReport bench_solver_time(int n_instances, std::uint64_t seed);
void write_timing_csv(std::ostream& os, const TimingReport& report);

}  // namespace ctrect
