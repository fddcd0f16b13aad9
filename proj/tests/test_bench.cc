#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ctrect/bench.h"
#include "ctrect/parallel.h"

using namespace ctrect;

TEST(Bench, QuantileMatchesLinearInterpolation) {
  // numpy.quantile([1, 2, 3, 4, 10], q)
  const std::vector<double> v{4.0, 1.0, 10.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.9), 7.6);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 10.0);
  const BoxStats b = box_stats(v);
  EXPECT_EQ(b.n, 5);
  EXPECT_DOUBLE_EQ(b.iqr, 2.0);
  EXPECT_DOUBLE_EQ(b.whisker_lo, 1.0);
  EXPECT_DOUBLE_EQ(b.whisker_hi, 4.0);  // 10 lies beyond q3 + 1.5 iqr = 7
}

TEST(Bench, StabilityDeterministicAndAccurate) {
  const auto a = study_stability(20, 7, 1);
  const auto b = study_stability(20, 7, 2);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lambda_hat, b[i].lambda_hat);
    EXPECT_TRUE(a[i].solved);
    EXPECT_LT(a[i].log10_warp, -6.0);
  }
  // Per-scene results do not depend on how many scenes are run.
  const auto c = study_stability(5, 7, 1);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c[i].lambda_gt, a[i].lambda_gt);
}

TEST(Bench, SensitivityBestBeatsRandomOnAverage) {
  SensitivityConfig cfg;
  cfg.sigmas = {0.5};
  cfg.n_scenes = 30;
  cfg.seed = 3;
  cfg.workers = 1;
  const SensitivityResult r = study_sensitivity(cfg);
  EXPECT_EQ(r.rows.size(), 30u * 2 * 4);
  const auto* best = r.find(SolverKind::kBest, 0.5, "warp_error");
  const auto* rnd = r.find(SolverKind::kRandom, 0.5, "warp_error");
  ASSERT_NE(best, nullptr);
  ASSERT_NE(rnd, nullptr);
  EXPECT_LE(best->stats.median, rnd->stats.median);
  EXPECT_EQ(r.find(SolverKind::kBest, 3.0, "warp_error"), nullptr);
}

TEST(Bench, ConvergenceRowsAreRunningBest) {
  ConvergenceConfig cfg;
  cfg.n_scenes = 4;
  cfg.iterations = 8;
  cfg.seed = 2;
  cfg.workers = 1;
  const auto rows = study_convergence(cfg);
  ASSERT_EQ(rows.size(), 16u);
  double prev[2] = {INFINITY, INFINITY};
  for (const ConvergenceRow& r : rows) {
    const int k = r.solver == SolverKind::kBest ? 0 : 1;
    EXPECT_TRUE(std::isfinite(r.mean_warp_error));
    EXPECT_LE(r.mean_warp_error, prev[k] + 1e-12);
    prev[k] = r.mean_warp_error;
  }
  std::ostringstream os;
  write_convergence_csv(os, rows);
  EXPECT_EQ(os.str().rfind("# ctrect convergence, format_version 1\n", 0), 0u);
}

TEST(Parallel, VisitsEveryIndexAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }, 3), std::runtime_error);
  EXPECT_GE(worker_count(), 1);
}
