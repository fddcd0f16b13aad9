#pragma once

// Synthetic ground truth: a camera viewing a square patch of the plane z = 0,
// affine frames on the patch duplicated by scene translations, division-model
// distortion, pixel noise and mismatched (outlier) frames.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ctrect/evl_solver.h"
#include "ctrect/geom.h"

namespace ctrect {

struct CameraPlane {
  Mat3 P = Mat3::Identity();  // plane (X, Y, 1) -> normalized image
  double lambda = 0.0;
};

struct LambdaSpec {
  bool fixed = true;
  double value = -4.0;
  double lo = -6.0;
  double hi = 0.0;

  static LambdaSpec constant(double v) { return {true, v, v, v}; }
  static LambdaSpec uniform(double lo, double hi) { return {false, 0.5 * (lo + hi), lo, hi}; }
};

struct SceneConfig {
  int width = 1000;
  int height = 1000;
  // 35mm-equivalent focal length range.
  double focal_min_mm = 15.0;
  double focal_max_mm = 50.0;
  LambdaSpec lambda = LambdaSpec::constant(-4.0);
  double sigma_px = 0.0;
  // Region correspondences (frame + translated copy) per scene.
  int frames = 10;
  int directions = 1;
  double outlier_fraction = 0.0;
  // Side length of the visible square patch, in scene units.
  double plane_extent = 10.0;
  // Fraction of the image the patch must cover.
  double min_coverage = 0.6;
  double max_tilt_deg = 60.0;

  void validate() const;
};

struct SceneFrame {
  std::array<Vec2, 3> points;  // local affine frame on the plane
  int direction_id = 0;
};

struct GroundTruthScene {
  SceneConfig config;
  std::uint64_t seed = 0;
  ImageFrame image;
  CameraPlane camera;
  LineH l_gt;                      // P^-T e3, l3 = 1
  std::vector<Vec2> translations;  // one scene translation per direction
  std::vector<SceneFrame> frames;
  std::vector<Correspondence> clean;
  std::vector<Correspondence> noisy;  // noise and outliers applied
  std::vector<bool> outlier;          // per correspondence in `noisy`

  Mat3 conjugate_translation(int direction_id) const;
  // Third column of H_u - I, i.e. u with H_u = I + u l_gt^T.
  PointH vanishing_point(int direction_id) const;
  // l_gt, lambda_gt and the true vanishing point of every direction.
  RectifyModel ground_truth_model() const;
};

// Splittable per-index seed derivation (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Normalized focal length for a 35mm-equivalent focal length.
double normalized_focal(double focal_mm, const ImageFrame& image);

// Throws Error(kRetryExhausted) after 100 rejected camera placements.
GroundTruthScene gen_scene(const SceneConfig& cfg, std::uint64_t seed);

std::vector<Correspondence> add_noise(std::span<const Correspondence> corrs, double sigma_px,
                                      const ImageFrame& image, std::mt19937_64& rng);

struct OutlierInjection {
  std::vector<Correspondence> corrs;
  std::vector<bool> mask;  // true = outlier
};

// Replaces the second points of round(fraction * #frames) whole frames with
// uniform random in-image points. Correspondences are grouped by frame_id, so
// a pool with one correspondence per frame is corrupted per correspondence.
OutlierInjection inject_outliers(std::span<const Correspondence> corrs, double fraction,
                                 const ImageFrame& image, std::mt19937_64& rng);

// P^-T (0, 0, 1) scaled to l3 = 1. Throws kSingularCamera / kDegenerateLine.
LineH gt_vanishing_line(const Mat3& P);

}  // namespace ctrect
