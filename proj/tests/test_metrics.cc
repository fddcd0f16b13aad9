#include <gtest/gtest.h>

#include <random>

#include "ctrect/errors.h"
#include "ctrect/metrics.h"
#include "test_util.h"

using namespace ctrect;

namespace {

GroundTruthScene default_scene(std::uint64_t seed) {
  SceneConfig cfg;
  cfg.directions = 2;
  return gen_scene(cfg, seed);
}

// Brute-force symmetric transfer error, written against the geometry
// primitives rather than the library's fused implementation.
double symmetric_oracle(const Vec3& l, double lambda, const Vec3& u, const Correspondence& c) {
  const Mat3 H = Mat3::Identity() + u * l.transpose();
  const Vec3 fx = undistort_point(c.pd, lambda).h;
  const Vec3 fxp = undistort_point(c.pd_prime, lambda).h;
  const Vec2 back = distort_point(PointH(Vec3(H.inverse() * fxp)), lambda).dehomogenized();
  const Vec2 fwd = distort_point(PointH(Vec3(H * fx)), lambda).dehomogenized();
  return (back - c.pd.h.head<2>()).squaredNorm() + (fwd - c.pd_prime.h.head<2>()).squaredNorm();
}

}  // namespace

TEST(Metrics, Tessellation) {
  const auto g = plane_tessellation(10.0, 10);
  ASSERT_EQ(g.size(), 100u);
  EXPECT_DOUBLE_EQ(g.front().x(), -4.5);
  EXPECT_DOUBLE_EQ(g.back().y(), 4.5);
}

TEST(Metrics, GroundTruthScoresZero) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GroundTruthScene s = default_scene(seed);
    const RectifyModel gt = s.ground_truth_model();
    EXPECT_LT(warp_error(gt, s), 1e-9);
    EXPECT_LT(transfer_error(gt, s), 1e-9);
    EXPECT_LT(transfer_error(gt, s, 1), 1e-9);
    EXPECT_LT(symm_transfer_error(gt, s.clean), 1e-20);
  }
}

TEST(Metrics, PerturbationIncreasesError) {
  const GroundTruthScene s = default_scene(3);
  RectifyModel m = s.ground_truth_model();
  m.lambda *= 1.05;
  EXPECT_GT(warp_error(m, s), 0.1);
  EXPECT_GT(symm_transfer_error(m, s.clean), 1e-12);
  m = s.ground_truth_model();
  m.l.h.x() += 0.05;
  EXPECT_GT(warp_error(m, s), 0.1);
  m = s.ground_truth_model();
  // Transfer is evaluated for a unit scene translation, so the scale of the
  // vanishing point does not matter.
  m.vps[0].u.h *= 1.1;
  EXPECT_LT(transfer_error(m, s, 0), 1e-9);
  EXPECT_LT(warp_error(m, s), 1e-9);
}

TEST(Metrics, WarpErrorIsAffineInvariant) {
  const GroundTruthScene s = default_scene(8);
  const Mat3 H = rectify_homography(LineH(Vec3(s.l_gt.h + Vec3(0.02, -0.01, 0.0))));
  Mat3 A;
  A << 2.0, 0.3, -0.1, -0.4, 0.7, 0.2, 0.0, 0.0, 1.0;
  const double lambda = s.camera.lambda * 0.9;
  EXPECT_NEAR(warp_error_for_rectifier(A * H, lambda, s), warp_error_for_rectifier(H, lambda, s),
              1e-9);
}

TEST(Metrics, LambdaRelativeError) {
  EXPECT_DOUBLE_EQ(lambda_rel_error(-4.0, -4.0).value, 0.0);
  EXPECT_DOUBLE_EQ(lambda_rel_error(0.0, -4.0).value, 1.0);
  EXPECT_NEAR(lambda_rel_error(-4.2, -4.0).value, 0.05, 1e-15);
  const LambdaError abs = lambda_rel_error(-0.3, 0.0);
  EXPECT_TRUE(abs.absolute);
  EXPECT_DOUBLE_EQ(abs.value, 0.3);
}

TEST(Metrics, SymmetricTransferMatchesOracle) {
  const GroundTruthScene s = default_scene(12);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.01);
  for (int i = 0; i < 50; ++i) {
    const Vec3 l = s.l_gt.h + Vec3(n(rng), n(rng), 0.0);
    Vec3 u = s.vanishing_point(0).h + Vec3(n(rng), n(rng), 0.0);
    u.z() = -(l.x() * u.x() + l.y() * u.y());
    const double lambda = s.camera.lambda + n(rng);
    for (const Correspondence& c : s.clean) {
      if (c.direction_id != 0) continue;
      EXPECT_NEAR(symm_transfer_error(l, lambda, u, c), symmetric_oracle(l, lambda, u, c), 1e-14);
    }
  }
  // No real preimage: both transfers contribute the sentinel.
  Correspondence far;
  far.pd = PointH(0.3, 0.0);
  far.pd_prime = PointH(0.31, 0.0);
  EXPECT_DOUBLE_EQ(symm_transfer_error(Vec3(0, 0, 1), 5.0, Vec3(100.0, 0.0, 0.0), far),
                   2.0 * kTransferSentinel);
}

TEST(Metrics, PreimageTranslationRecoversSceneTranslation) {
  const GroundTruthScene s = default_scene(4);
  const Vec3 U = preimage_translation(s.l_gt.h, s.vanishing_point(0).h, s.camera.P);
  EXPECT_NEAR(U.z(), 0.0, 1e-12);
  EXPECT_LT((U.head<2>() - s.translations[0]).norm(), 1e-9 * s.translations[0].norm());
  // The opposite vanishing point is the inverse translation.
  RectifyModel m = s.ground_truth_model();
  m.vps[0].u.h = -m.vps[0].u.h;
  EXPECT_GT(transfer_error(m, s, 0), 1.0);
}

TEST(Metrics, MissingVanishingPointThrows) {
  const GroundTruthScene s = default_scene(4);
  RectifyModel m = s.ground_truth_model();
  m.vps.clear();
  try {
    transfer_error(m, s, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateU);
  }
}
