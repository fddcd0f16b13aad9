#pragma once

// Accuracy metrics against a synthetic ground truth, and the symmetric
// transfer error used to score hypotheses. Warp and transfer errors are RMS
// distances in pixels; the symmetric transfer error is in normalized units^2.

#include <span>
#include <vector>

#include "ctrect/evl_solver.h"
#include "ctrect/geom.h"
#include "ctrect/scene.h"

namespace ctrect {

// Contribution of a transfer that has no real distorted preimage.
inline constexpr double kTransferSentinel = 1.0;

// n x n grid of cell centers covering the square [-extent/2, extent/2]^2.
std::vector<Vec2> plane_tessellation(double extent, int n = 10);

struct WarpFit {
  double rms_px = 0.0;
  // Affine ambiguity taking rectified points to plane coordinates.
  Mat3 A = Mat3::Identity();
  bool unrectifiable = false;
};

// Round trip distorted image -> rectified plane (H_rect, lambda_hat) -> affine
// fit -> ground-truth camera and distortion. An unrectifiable grid point
// (rectified w ~ 0 or no distorted image) gives rms_px = +inf and the flag.
WarpFit warp_fit(const Mat3& H_rect, double lambda_hat, const GroundTruthScene& gt);
double warp_error_for_rectifier(const Mat3& H_rect, double lambda_hat,
                                const GroundTruthScene& gt);
double warp_error(const RectifyModel& model, const GroundTruthScene& gt);

// Scene-plane preimage of the estimated conjugate translation,
// P^-1 (H_u - I) l_P / (l_P^T l_P) with l_P = P^-T e3.
Vec3 preimage_translation(const Vec3& l_hat, const Vec3& u_hat, const Mat3& P);

// Unit-translation transfer error of direction `direction_id`. Throws
// Error(kDegenerateU) when the preimage translation vanishes or the model has
// no vanishing point for the direction. +inf when a transfer has no image.
double transfer_error(const RectifyModel& model, const GroundTruthScene& gt, int direction_id);
// Pooled over every direction of the scene.
double transfer_error(const RectifyModel& model, const GroundTruthScene& gt);

struct LambdaError {
  double value = 0.0;
  // Set when lambda_gt = 0 and the absolute error is reported instead.
  bool absolute = false;
};
LambdaError lambda_rel_error(double lambda_hat, double lambda_gt);

// d(x, f^d(H^-1 f(x'))))^2 + d(f^d(H f(x)), x')^2 for H = I + u l^T. Each
// failed transfer contributes kTransferSentinel.
double symm_transfer_error(const Vec3& l, double lambda, const Vec3& u, const Correspondence& c);
double symm_transfer_error(const Vec3& l, double lambda, const Vec3& u,
                           std::span<const Correspondence> corrs);
// Uses the model's vanishing point for each correspondence's direction.
double symm_transfer_error(const RectifyModel& model, std::span<const Correspondence> corrs);

}  // namespace ctrect
