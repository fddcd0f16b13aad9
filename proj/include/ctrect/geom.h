#pragma once

// Homogeneous 2D primitives, the one-parameter division model and conjugate
// translations. All coordinates are distortion-center subtracted and scaled
// by 1 / (width + height) unless a function explicitly says "pixel".

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <optional>

namespace ctrect {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Relative threshold under which the homogeneous scale of a point is treated
// as zero.
inline constexpr double kEpsW = 1e-12;

struct PointH {
  Vec3 h = Vec3(0.0, 0.0, 1.0);

  PointH() = default;
  explicit PointH(const Vec3& v) : h(v) {}
  PointH(double x, double y, double w = 1.0) : h(x, y, w) {}

  double x() const { return h.x(); }
  double y() const { return h.y(); }
  double w() const { return h.z(); }

  bool is_finite() const { return std::abs(h.z()) > kEpsW * h.norm(); }
  // Throws Error(kUnrectifiablePoint) when !is_finite().
  Vec2 dehomogenized() const;
};

struct LineH {
  Vec3 h = Vec3(0.0, 0.0, 1.0);

  LineH() = default;
  explicit LineH(const Vec3& v) : h(v) {}
  LineH(double l1, double l2, double l3) : h(l1, l2, l3) {}

  // Scales the line so that l3 = 1. Throws Error(kDegenerateLine) when the
  // line (nearly) passes through the origin.
  LineH normalized_l3(double rel_tol = 1e-8) const;
};

// Feasibility window for the division parameter.
struct Interval {
  double lo = -8.0;
  double hi = 1.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct DivisionModel {
  double lambda = 0.0;
};

struct ImageFrame {
  int width = 1000;
  int height = 1000;
  Vec2 center = Vec2(500.0, 500.0);
  double norm_scale = 1.0 / 2000.0;

  static ImageFrame make(int width, int height,
                         std::optional<Vec2> center = std::nullopt);
  // True when the pixel lies inside [0, width] x [0, height].
  bool contains_px(const Vec2& px) const;
};

PointH normalize_to_frame(const Vec2& p_px, const ImageFrame& frame);
Vec2 denormalize_from_frame(const PointH& p, const ImageFrame& frame);

// Division model f(x~, lambda) = (x~, y~, 1 + lambda * r~^2). The input must
// have w = 1; the result may have w <= 0 for points beyond the modeled field
// of view.
PointH undistort_point(const PointH& pd, double lambda);
Vec3 undistort(const Vec2& pd, double lambda);

// Inverse of the division model on the branch continuous at lambda = 0:
// r~ = 2 r / (1 + sqrt(1 - 4 lambda r^2)). Throws Error(kNoRealPreimage).
PointH distort_point(const PointH& p, double lambda);
// Non-throwing variant used in inner loops. Returns nullopt when the point is
// at infinity or has no real preimage.
std::optional<Vec2> try_distort(const Vec3& p, double lambda);
std::optional<Vec2> try_distort(const Vec2& p, double lambda);

// [[1,0,0],[0,1,0],[l1,l2,l3]]; throws Error(kDegenerateLine) when
// |l3| < 1e-8 ||l||.
Mat3 rectify_homography(const LineH& l);

// P * T(U) * P^-1. Throws Error(kSingularCamera) for det P ~ 0.
Mat3 conjugate_translation(const Mat3& P, const Vec2& U);

LineH join(const PointH& p, const PointH& q);
PointH meet(const LineH& a, const LineH& b);
Mat3 skew(const Vec3& v);

// Conjugate translation H = I + u l^T with l3 = 1.
struct ConjugateTranslation {
  PointH u;
  LineH l;

  Mat3 matrix() const { return Mat3::Identity() + u.h * l.h.transpose(); }
  Mat3 inverse() const;
};

}  // namespace ctrect
