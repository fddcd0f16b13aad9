#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ctrect/errors.h"
#include "ctrect/metrics.h"
#include "ctrect/ransac.h"

using namespace ctrect;

namespace {

GroundTruthScene make_scene(std::uint64_t seed, double sigma, double outliers) {
  SceneConfig cfg;
  cfg.sigma_px = sigma;
  cfg.outlier_fraction = outliers;
  return gen_scene(cfg, seed);
}

}  // namespace

TEST(Ransac, NoiselessSingleIteration) {
  const GroundTruthScene s = make_scene(1, 0.0, 0.0);
  RansacConfig cfg;
  cfg.iterations = 1;
  cfg.scoring = Scoring::kConsensus;
  const RansacResult r = run_fixed(make_solver(SolverKind::kBest), s.noisy, cfg);
  EXPECT_NEAR(r.model.lambda, s.camera.lambda, 1e-8);
  EXPECT_EQ(r.inliers, static_cast<int>(s.noisy.size()));
  EXPECT_LT(warp_error(r.model, s), 1e-6);
}

TEST(Ransac, OracleTraceIsNonIncreasing) {
  const GroundTruthScene s = make_scene(2, 1.0, 0.3);
  for (Scoring sc : {Scoring::kWarpOracle, Scoring::kTransferOracle, Scoring::kLambdaOracle}) {
    RansacConfig cfg;
    cfg.scoring = sc;
    cfg.seed = 9;
    const RansacResult r = run_fixed(make_solver(SolverKind::kRandom), s.noisy, cfg, &s);
    ASSERT_EQ(r.trace.size(), 25u);
    double prev = INFINITY;
    for (const TraceRow& t : r.trace) {
      if (std::isnan(t.score)) continue;
      EXPECT_LE(t.score, prev);
      prev = t.score;
    }
    EXPECT_EQ(r.trace.back().score, r.score);
  }
}

TEST(Ransac, ConsensusFindsInliers) {
  const GroundTruthScene s = make_scene(3, 0.0, 0.4);
  RansacConfig cfg;
  cfg.scoring = Scoring::kConsensus;
  cfg.seed = 4;
  const RansacResult r = run_fixed(make_solver(SolverKind::kBest), s.noisy, cfg);
  const std::vector<bool> in = consensus_set(r.model, s.noisy, cfg.inlier_threshold);
  int count = 0, outliers_in = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    count += in[i];
    outliers_in += in[i] && s.outlier[i];
  }
  EXPECT_EQ(count, r.inliers);
  EXPECT_GE(count, 18);
  EXPECT_EQ(outliers_in, 0);
  // A tighter threshold never admits more correspondences.
  const std::vector<bool> tight = consensus_set(r.model, s.noisy, 0.5 * cfg.inlier_threshold);
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_TRUE(!tight[i] || in[i]);
}

TEST(Ransac, IndependentOfWorkerCount) {
  const GroundTruthScene s = make_scene(4, 1.0, 0.2);
  RansacConfig cfg;
  cfg.scoring = Scoring::kConsensus;
  cfg.seed = 123;
  cfg.workers = 1;
  const RansacResult a = run_fixed(make_solver(SolverKind::kBest), s.noisy, cfg);
  cfg.workers = 3;
  const RansacResult b = run_fixed(make_solver(SolverKind::kBest), s.noisy, cfg);
  EXPECT_EQ(a.model.lambda, b.model.lambda);
  EXPECT_EQ(a.model.l.h, b.model.l.h);
  EXPECT_EQ(a.inliers, b.inliers);
  const auto ha = generate_hypotheses(s.noisy, make_solver(SolverKind::kRandom), 10, 5, 1);
  const auto hb = generate_hypotheses(s.noisy, make_solver(SolverKind::kBest), 10, 5, 2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(ha[i].frame_id, hb[i].frame_id);
}

TEST(Ransac, ConfigurationErrors) {
  const GroundTruthScene s = make_scene(5, 0.0, 0.0);
  RansacConfig cfg;
  cfg.scoring = Scoring::kWarpOracle;
  try {
    run_fixed(make_solver(SolverKind::kBest), s.noisy, cfg, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
  }
  cfg.iterations = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Ransac, TraceCsvHeader) {
  std::vector<TraceRow> rows(2);
  rows[1].iteration = 1;
  std::ostringstream os;
  write_trace_csv(os, rows);
  EXPECT_EQ(os.str().rfind("# ctrect ransac trace, format_version 1\n", 0), 0u);
}
