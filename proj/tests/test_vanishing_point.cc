#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "ctrect/errors.h"
#include "ctrect/evp_constraints.h"
#include "ctrect/vanishing_point.h"
#include "test_util.h"

using namespace ctrect;
using ctrect::testing::minimal_scene;

TEST(RecoverVp, NoiselessMatchesGroundTruth) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const GroundTruthScene scene = minimal_scene(seed, -0.1 * static_cast<double>(seed));
    const VpEstimate est = recover_vp_detailed(scene.l_gt, scene.camera.lambda, scene.noisy);
    const Vec3 u_gt = scene.vanishing_point(0).h;
    EXPECT_LT((est.u.h - u_gt).norm(), 1e-8 * u_gt.norm()) << seed;
    EXPECT_NEAR(scene.l_gt.h.dot(est.u.h), 0.0, 1e-12);
    EXPECT_EQ(est.excluded, 0);
    EXPECT_LT(est.residual, 1e-10);
  }
}

TEST(RecoverVp, SingleCorrespondenceIsRankDeficient) {
  const GroundTruthScene scene = minimal_scene(4);
  try {
    recover_vp(scene.l_gt, scene.camera.lambda, std::span(scene.noisy).first(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
  }
  EXPECT_FALSE(try_recover_vp(scene.l_gt.h, scene.camera.lambda, std::span(scene.noisy).first(1)));
}

TEST(EvpConstraints, GroundTruthSatisfiesConstraints) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const GroundTruthScene scene = minimal_scene(seed);
    const Vec3 u = scene.vanishing_point(0).h;
    for (const Correspondence& c : scene.noisy) {
      EXPECT_LT(evp_constraint_residuals(scene.l_gt.h, u, 1.0, scene.camera.lambda, c).norm(),
                1e-12);
    }
    const auto M = evp_matrix_eval(scene.l_gt.h.x(), scene.l_gt.h.y(), 1.0, scene.camera.lambda,
                                   scene.noisy);
    Eigen::JacobiSVD<Eigen::Matrix<double, 7, 4>> svd(M, Eigen::ComputeFullV);
    const auto s = svd.singularValues();
    EXPECT_LT(s(3), 1e-10 * s(0));
    Eigen::Vector4d n = svd.matrixV().col(3);
    n /= n(3);
    EXPECT_LT((n.head<3>() - u).norm(), 1e-6 * u.norm());
  }
}

TEST(EvpConstraints, WrongLambdaViolatesConstraints) {
  const GroundTruthScene scene = minimal_scene(2);
  const Vec3 u = scene.vanishing_point(0).h;
  double total = 0.0;
  for (const Correspondence& c : scene.noisy) {
    total += evp_constraint_residuals(scene.l_gt.h, u, 1.0, scene.camera.lambda + 0.5, c).norm();
  }
  EXPECT_GT(total, 1e-6);
}

TEST(EvpConstraints, ResidualStructureAndRank) {
  const GroundTruthScene scene = minimal_scene(6);
  const Vec3 u = scene.vanishing_point(0).h;
  const double lambda = scene.camera.lambda;
  const Correspondence& c = scene.noisy[0];
  // The skew operator annihilates f(x'), so the residual is orthogonal to it.
  const Vec3 r = evp_constraint_residuals(scene.l_gt.h, u, 1.0, lambda + 0.1, c);
  EXPECT_GT(r.norm(), 1e-8);
  EXPECT_NEAR(r.dot(undistort(c.pd_prime.h.head<2>(), lambda + 0.1)), 0.0, 1e-15);

  const auto M = evp_matrix_eval(scene.l_gt.h.x(), scene.l_gt.h.y(), 1.0, lambda + 0.7,
                                 scene.noisy);
  Eigen::JacobiSVD<Eigen::Matrix<double, 7, 4>> svd(M);
  EXPECT_GT(svd.singularValues()(3), 1e-6 * svd.singularValues()(0));
  // Third skew rows have no u3 term, second skew rows no u2 term.
  for (int row : {0, 1, 4}) EXPECT_EQ(M(row, 2), 0.0);
  for (int row : {2, 3, 5}) EXPECT_EQ(M(row, 1), 0.0);
}
