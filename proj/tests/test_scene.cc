#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ctrect/errors.h"
#include "ctrect/evp_constraints.h"
#include "ctrect/scene.h"

using namespace ctrect;

TEST(Scene, DeterministicPerSeed) {
  SceneConfig cfg;
  cfg.sigma_px = 1.0;
  cfg.outlier_fraction = 0.3;
  const GroundTruthScene a = gen_scene(cfg, 77), b = gen_scene(cfg, 77), c = gen_scene(cfg, 78);
  ASSERT_EQ(a.noisy.size(), b.noisy.size());
  for (std::size_t i = 0; i < a.noisy.size(); ++i) {
    EXPECT_EQ(a.noisy[i].pd.h, b.noisy[i].pd.h);
    EXPECT_EQ(a.noisy[i].pd_prime.h, b.noisy[i].pd_prime.h);
  }
  EXPECT_EQ(a.outlier, b.outlier);
  EXPECT_NE(a.noisy[0].pd.h, c.noisy[0].pd.h);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Scene, CleanCorrespondencesAreConjugateTranslations) {
  SceneConfig cfg;
  cfg.directions = 2;
  cfg.lambda = LambdaSpec::uniform(-6.0, 0.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GroundTruthScene s = gen_scene(cfg, seed);
    EXPECT_EQ(s.clean.size(), 3u * cfg.frames);
    EXPECT_NEAR(s.l_gt.h.z(), 1.0, 1e-15);
    EXPECT_GE(std::abs(s.l_gt.h.z()), 1e-3 * s.l_gt.h.norm());
    EXPECT_GE(s.camera.lambda, -6.0);
    EXPECT_LE(s.camera.lambda, 0.0);
    std::set<int> dirs;
    for (const Correspondence& c : s.clean) {
      dirs.insert(c.direction_id);
      const Vec3 u = s.vanishing_point(c.direction_id).h;
      EXPECT_NEAR(s.l_gt.h.dot(u), 0.0, 1e-12);
      EXPECT_LT(evp_constraint_residuals(s.l_gt.h, u, 1.0, s.camera.lambda, c).norm(), 1e-12);
      for (const PointH* p : {&c.pd, &c.pd_prime}) {
        EXPECT_TRUE(s.image.contains_px(denormalize_from_frame(*p, s.image)));
      }
    }
    EXPECT_EQ(dirs.size(), 2u);
  }
}

TEST(Scene, NoiseStandardDeviation) {
  SceneConfig cfg;
  cfg.sigma_px = 1.5;
  double sum2 = 0.0;
  long n = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const GroundTruthScene s = gen_scene(cfg, seed);
    for (std::size_t i = 0; i < s.clean.size(); ++i) {
      const Vec2 d0 = (s.noisy[i].pd.h - s.clean[i].pd.h).head<2>() / s.image.norm_scale;
      const Vec2 d1 =
          (s.noisy[i].pd_prime.h - s.clean[i].pd_prime.h).head<2>() / s.image.norm_scale;
      sum2 += d0.squaredNorm() + d1.squaredNorm();
      n += 4;
    }
  }
  EXPECT_NEAR(std::sqrt(sum2 / n), cfg.sigma_px, 0.02 * cfg.sigma_px);
}

TEST(Scene, OutliersReplaceWholeFrames) {
  SceneConfig cfg;
  cfg.outlier_fraction = 0.5;
  const GroundTruthScene s = gen_scene(cfg, 5);
  ASSERT_EQ(s.outlier.size(), s.noisy.size());
  int flagged = 0;
  for (std::size_t i = 0; i < s.noisy.size(); ++i) {
    EXPECT_EQ(s.outlier[i], s.outlier[3 * (i / 3)]);
    if (s.outlier[i]) {
      ++flagged;
      EXPECT_EQ(s.noisy[i].pd.h, s.clean[i].pd.h);
      EXPECT_NE(s.noisy[i].pd_prime.h, s.clean[i].pd_prime.h);
    }
  }
  EXPECT_EQ(flagged, 3 * 5);
}

TEST(Scene, InvalidConfigurationThrows) {
  SceneConfig cfg;
  cfg.frames = 0;
  EXPECT_THROW(gen_scene(cfg, 1), Error);
  cfg = SceneConfig{};
  cfg.outlier_fraction = 1.5;
  EXPECT_THROW(gen_scene(cfg, 1), Error);
}

TEST(Scene, PinholeConfigurationHasNoDistortion) {
  SceneConfig cfg;
  cfg.lambda = LambdaSpec::constant(0.0);
  const GroundTruthScene s = gen_scene(cfg, 9);
  for (std::size_t k = 0; k < s.frames.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      const Vec3 x = s.camera.P * s.frames[k].points[i].homogeneous();
      EXPECT_LT((s.clean[3 * k + i].pd.h.head<2>() - x.hnormalized()).norm(), 1e-14);
    }
  }
}
