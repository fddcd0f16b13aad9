#pragma once

// Fixed-budget hypothesize-and-verify driver. Each iteration draws one frame
// (three correspondences) uniformly, runs a minimal solver on it and scores
// the hypothesis either against ground truth or by consensus.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ctrect/evl_solver.h"
#include "ctrect/scene.h"

namespace ctrect {

enum class Scoring { kWarpOracle, kTransferOracle, kLambdaOracle, kConsensus };
enum class SolverKind { kBest, kRandom };

using MinimalSolver =
    std::function<RectifyModel(std::span<const Correspondence>, std::mt19937_64&)>;

MinimalSolver make_solver(SolverKind kind, const SolverOptions& opt = {});

struct RansacConfig {
  int iterations = 25;
  Scoring scoring = Scoring::kWarpOracle;
  // Per-correspondence symmetric transfer distance, normalized units
  // (2 px for a 1000 x 1000 image).
  double inlier_threshold = 2.0 / 2000.0;
  // Hypotheses whose solver score exceeds this are discarded unscored.
  std::optional<double> preemption_threshold;
  std::uint64_t seed = 0;
  // 0 selects worker_count().
  int workers = 1;

  void validate() const;
};

struct Hypothesis {
  int iteration = 0;
  int frame_id = -1;
  std::optional<RectifyModel> model;
};

// Iteration i uses an rng seeded with derive_seed(seed, i), so the sampled
// frames depend only on the seed and pool, not on the solver or worker count.
std::vector<Hypothesis> generate_hypotheses(std::span<const Correspondence> pool,
                                           const MinimalSolver& solver, int iterations,
                                           std::uint64_t seed, int workers = 1);

struct TraceRow {
  int iteration = 0;
  // Running best values; NaN before the first model.
  double score = 0.0;
  double warp_error = 0.0;
  double transfer_error = 0.0;
  double lambda_hat = 0.0;
};

struct RansacResult {
  RectifyModel model;
  double score = 0.0;
  int inliers = 0;
  std::vector<TraceRow> trace;
};

// Oracle scorings require `gt`. Consensus maximizes the inlier count and breaks
// ties by the summed symmetric transfer error of the inliers. Throws
// Error(kNoModelFound) when no iteration produced a model.
RansacResult run_fixed(const MinimalSolver& solver, std::span<const Correspondence> pool,
                       const RansacConfig& cfg, const GroundTruthScene* gt = nullptr);

// Correspondences whose symmetric transfer error is at most threshold^2.
std::vector<bool> consensus_set(const RectifyModel& model, std::span<const Correspondence> pool,
                                double threshold);

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace);

}  // namespace ctrect
