#include <gtest/gtest.h>

#include <sstream>

#include "ctrect/errors.h"
#include "ctrect/image_warp.h"
#include "ctrect/metrics.h"
#include "ctrect/raster.h"
#include "ctrect/scene_io.h"
#include "test_util.h"

using namespace ctrect;

TEST(SceneIo, CorrespondencesRoundTrip) {
  SceneConfig cfg;
  cfg.sigma_px = 0.5;
  cfg.outlier_fraction = 0.2;
  const GroundTruthScene s = gen_scene(cfg, 31);
  const nlohmann::json doc = scene_to_json(s);
  EXPECT_EQ(doc.at("format_version"), kFormatVersion);
  const CorrespondenceSet set = correspondences_from_json(nlohmann::json::parse(doc.dump()));
  ASSERT_EQ(set.corrs.size(), s.noisy.size());
  for (std::size_t i = 0; i < s.noisy.size(); ++i) {
    EXPECT_LT((set.corrs[i].pd.h - s.noisy[i].pd.h).norm(), 1e-15);
    EXPECT_LT((set.corrs[i].pd_prime.h - s.noisy[i].pd_prime.h).norm(), 1e-15);
    EXPECT_EQ(set.corrs[i].frame_id, s.noisy[i].frame_id);
  }
  ASSERT_TRUE(set.ground_truth.has_value());
  EXPECT_EQ(set.ground_truth->outlier, s.outlier);
  EXPECT_EQ(set.ground_truth->camera.lambda, s.camera.lambda);
  // The restored ground truth evaluates exactly like the original.
  const RectifyModel gt = s.ground_truth_model();
  EXPECT_LT(warp_error(gt, *set.ground_truth), 1e-9);
}

TEST(SceneIo, ModelRoundTrip) {
  const GroundTruthScene s = ctrect::testing::minimal_scene(3);
  const RectifyModel m = solve_best(s.noisy);
  const RectifyModel r = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  EXPECT_EQ(r.lambda, m.lambda);
  EXPECT_EQ(r.l.h, m.l.h);
  ASSERT_EQ(r.vps.size(), m.vps.size());
  EXPECT_EQ(r.vps[0].u.h, m.vps[0].u.h);
  EXPECT_EQ(r.provenance, m.provenance);
}

TEST(SceneIo, SchemaViolations) {
  nlohmann::json doc = {{"format_version", 2}};
  try {
    correspondences_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
  }
  EXPECT_THROW(model_from_json(nlohmann::json::object()), Error);
  const SceneConfig c = scene_config_from_json({{"lambda", {-6.0, -1.0}}, {"frames", 4}});
  EXPECT_FALSE(c.lambda.fixed);
  EXPECT_EQ(c.lambda.lo, -6.0);
  EXPECT_EQ(c.frames, 4);
  const nlohmann::json err = error_to_json(Error(ErrorCode::kNoValidModel, "x"));
  EXPECT_EQ(err.at("format_version"), kFormatVersion);
}

TEST(Raster, PpmRoundTrip) {
  Image img(5, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) {
      img.pixel(x, y)[0] = static_cast<std::uint8_t>(x * 40);
      img.pixel(x, y)[1] = static_cast<std::uint8_t>(y * 70);
      img.pixel(x, y)[2] = 200;
    }
  std::stringstream ss;
  write_ppm(ss, img);
  const Image back = read_ppm(ss);
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.rgb, img.rgb);
  std::istringstream comment("P6\n# made by hand\n1 1\n255\n\x01\x02\x03");
  EXPECT_EQ(read_ppm(comment).rgb, (std::vector<std::uint8_t>{1, 2, 3}));
  std::istringstream bad("P3\n1 1\n255\n1 2 3\n");
  EXPECT_THROW(read_ppm(bad), Error);
}

TEST(ImageWarp, IdentityModelLeavesImageUnchanged) {
  Image img(40, 30);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(6 * x);
      p[1] = static_cast<std::uint8_t>(8 * y);
      p[2] = static_cast<std::uint8_t>((x * y) % 256);
    }
  const RectifyModel identity;
  for (WarpMode mode : {WarpMode::kUndistort, WarpMode::kRectify}) {
    const Image out = warp_image(img, identity, mode);
    ASSERT_EQ(out.width, img.width);
    ASSERT_EQ(out.height, img.height);
    int max_diff = 0;
    for (std::size_t i = 0; i < img.rgb.size(); ++i) {
      max_diff = std::max(max_diff, std::abs(int(out.rgb[i]) - int(img.rgb[i])));
    }
    EXPECT_LE(max_diff, 1);
  }
}

TEST(ImageWarp, OutputRespectsMaxSize) {
  Image img(64, 48);
  RectifyModel m;
  m.lambda = -2.0;
  WarpOptions opt;
  opt.max_size = 50;
  const Image out = warp_image(img, m, WarpMode::kUndistort, opt);
  EXPECT_LE(std::max(out.width, out.height), 50);
  EXPECT_GT(out.width, 0);
}
