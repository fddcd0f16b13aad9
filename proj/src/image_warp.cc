#include "ctrect/image_warp.h"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctrect/errors.h"

namespace ctrect {

namespace {

constexpr int kBoundSamples = 64;

Mat3 target_homography(const RectifyModel& model, WarpMode mode) {
  return mode == WarpMode::kRectify ? rectify_homography(model.l) : Mat3::Identity();
}

}  // namespace

Image warp_image(const Image& src, const RectifyModel& model, WarpMode mode,
                 const WarpOptions& opt) {
  if (src.width <= 0 || src.height <= 0) throw Error(ErrorCode::kIo, "empty input raster");
  const ImageFrame frame = ImageFrame::make(src.width, src.height);
  const Mat3 H = target_homography(model, mode);
  const Mat3 H_inv = H.inverse();
  const double lambda = model.lambda;

  // Bounds of the forward map over the raster border and an interior grid.
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  auto extend = [&](const Vec2& px) {
    const Vec2 xd = (px - frame.center) * frame.norm_scale;
    const Vec3 y = H * undistort(xd, lambda);
    if (!(y.z() > kEpsW * y.norm())) return;
    const Vec2 p = y.head<2>() / y.z();
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (int k = 0; k <= src.width; ++k) {
    extend(Vec2(k, 0.0));
    extend(Vec2(k, src.height));
  }
  for (int k = 0; k <= src.height; ++k) {
    extend(Vec2(0.0, k));
    extend(Vec2(src.width, k));
  }
  for (int i = 0; i <= kBoundSamples; ++i) {
    for (int j = 0; j <= kBoundSamples; ++j) {
      extend(Vec2(src.width * i / double(kBoundSamples), src.height * j / double(kBoundSamples)));
    }
  }
  if (!(lo.x() < hi.x()) || !(lo.y() < hi.y())) {
    throw Error(ErrorCode::kUnrectifiablePoint, "no part of the raster maps to the output");
  }

  double pixel = frame.norm_scale;
  const Vec2 extent = hi - lo;
  const double largest = std::max(extent.x(), extent.y()) / pixel;
  if (largest > opt.max_size) pixel *= largest / opt.max_size;
  // Snap near-integer sizes so that an identity warp keeps the input size.
  auto side = [&](double e) {
    const double n = e / pixel;
    return std::max(1, static_cast<int>(std::ceil(n - 1e-9)));
  };
  Image out(side(extent.x()), side(extent.y()));

  for (int v = 0; v < out.height; ++v) {
    for (int u = 0; u < out.width; ++u) {
      const Vec2 y = lo + pixel * Vec2(u + 0.5, v + 0.5);
      const auto xd = try_distort(Vec3(H_inv * Vec3(y.x(), y.y(), 1.0)), lambda);
      if (!xd) continue;
      const Vec2 px = *xd / frame.norm_scale + frame.center;
      if (!(px.x() >= 0.0 && px.y() >= 0.0 && px.x() <= src.width && px.y() <= src.height)) continue;
      // Continuous index with pixel centers at integers, clamped to the raster.
      const double fx = std::clamp(px.x() - 0.5, 0.0, src.width - 1.0);
      const double fy = std::clamp(px.y() - 0.5, 0.0, src.height - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const int x1 = std::min(x0 + 1, src.width - 1);
      const int y1 = std::min(y0 + 1, src.height - 1);
      const double ax = fx - x0;
      const double ay = fy - y0;
      std::uint8_t* dst = out.pixel(u, v);
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - ax) * src.pixel(x0, y0)[c] + ax * src.pixel(x1, y0)[c];
        const double bottom = (1.0 - ax) * src.pixel(x0, y1)[c] + ax * src.pixel(x1, y1)[c];
        const double value = (1.0 - ay) * top + ay * bottom;
        dst[c] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace ctrect
