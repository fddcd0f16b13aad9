#include "ctrect/geom.h"

#include <Eigen/LU>

#include <cmath>
#include <string>

#include "ctrect/errors.h"

namespace ctrect {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoRealPreimage: return "NoRealPreimage";
    case ErrorCode::kDegenerateLine: return "DegenerateLine";
    case ErrorCode::kSingularCamera: return "SingularCamera";
    case ErrorCode::kIdenticallyZero: return "IdenticallyZero";
    case ErrorCode::kIdenticallyZeroDeterminant: return "IdenticallyZeroDeterminant";
    case ErrorCode::kDegenerateSelection: return "DegenerateSelection";
    case ErrorCode::kNoFeasibleRoot: return "NoFeasibleRoot";
    case ErrorCode::kNoValidModel: return "NoValidModel";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kRetryExhausted: return "RetryExhausted";
    case ErrorCode::kUnrectifiablePoint: return "UnrectifiablePoint";
    case ErrorCode::kDegenerateU: return "DegenerateU";
    case ErrorCode::kNoModelFound: return "NoModelFound";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Vec2 PointH::dehomogenized() const {
  if (!is_finite()) {
    throw Error(ErrorCode::kUnrectifiablePoint, "point at infinity cannot be dehomogenized");
  }
  return h.head<2>() / h.z();
}

LineH LineH::normalized_l3(double rel_tol) const {
  if (!(std::abs(h.z()) >= rel_tol * h.norm()) || h.norm() == 0.0) {
    throw Error(ErrorCode::kDegenerateLine, "vanishing line passes through the distortion center");
  }
  return LineH(h / h.z());
}

ImageFrame ImageFrame::make(int width, int height, std::optional<Vec2> center) {
  ImageFrame f;
  f.width = width;
  f.height = height;
  f.center = center.value_or(Vec2(0.5 * width, 0.5 * height));
  f.norm_scale = 1.0 / static_cast<double>(width + height);
  return f;
}

bool ImageFrame::contains_px(const Vec2& px) const {
  return px.x() >= 0.0 && px.y() >= 0.0 && px.x() <= width && px.y() <= height;
}

PointH normalize_to_frame(const Vec2& p_px, const ImageFrame& frame) {
  const Vec2 n = (p_px - frame.center) * frame.norm_scale;
  return PointH(n.x(), n.y(), 1.0);
}

Vec2 denormalize_from_frame(const PointH& p, const ImageFrame& frame) {
  return p.dehomogenized() / frame.norm_scale + frame.center;
}

Vec3 undistort(const Vec2& pd, double lambda) {
  return Vec3(pd.x(), pd.y(), 1.0 + lambda * pd.squaredNorm());
}

PointH undistort_point(const PointH& pd, double lambda) {
  return PointH(undistort(pd.h.head<2>() / pd.w(), lambda));
}

std::optional<Vec2> try_distort(const Vec2& p, double lambda) {
  const double disc = 1.0 - 4.0 * lambda * p.squaredNorm();
  if (!(disc >= 0.0)) return std::nullopt;
  return p * (2.0 / (1.0 + std::sqrt(disc)));
}

std::optional<Vec2> try_distort(const Vec3& p, double lambda) {
  if (!(std::abs(p.z()) > kEpsW * p.norm())) return std::nullopt;
  return try_distort(Vec2(p.head<2>() / p.z()), lambda);
}

PointH distort_point(const PointH& p, double lambda) {
  const Vec2 x = p.dehomogenized();
  const auto d = try_distort(x, lambda);
  if (!d) {
    throw Error(ErrorCode::kNoRealPreimage,
                "no real distorted preimage: 1 - 4 lambda r^2 < 0");
  }
  return PointH(d->x(), d->y(), 1.0);
}

Mat3 rectify_homography(const LineH& l) {
  if (!(std::abs(l.h.z()) >= 1e-8 * l.h.norm()) || l.h.norm() == 0.0) {
    throw Error(ErrorCode::kDegenerateLine, "rectifying line has l3 ~ 0");
  }
  Mat3 H = Mat3::Identity();
  H.row(2) = l.h.transpose();
  return H;
}

Mat3 conjugate_translation(const Mat3& P, const Vec2& U) {
  const double scale = P.norm();
  if (!(std::abs(P.determinant()) > 1e-12 * scale * scale * scale)) {
    throw Error(ErrorCode::kSingularCamera, "camera homography is singular");
  }
  Mat3 T = Mat3::Identity();
  T(0, 2) = U.x();
  T(1, 2) = U.y();
  return P * T * P.inverse();
}

LineH join(const PointH& p, const PointH& q) { return LineH(p.h.cross(q.h)); }

PointH meet(const LineH& a, const LineH& b) { return PointH(a.h.cross(b.h)); }

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return S;
}

Mat3 ConjugateTranslation::inverse() const {
  const double denom = 1.0 + l.h.dot(u.h);
  return Mat3::Identity() - u.h * l.h.transpose() / denom;
}

}  // namespace ctrect
