#pragma once

// Raster undistortion and affine rectification by inverse mapping.

#include "ctrect/evl_solver.h"
#include "ctrect/raster.h"

namespace ctrect {

enum class WarpMode { kUndistort, kRectify };

struct WarpOptions {
  // Largest output side; the output pixel size grows when the fitted bounds
  // would exceed it.
  int max_size = 4096;
};

// The output frame is fitted to the forward image of the source raster at the
// source pixel size. Samples are bilinear; target pixels without a source
// preimage are black.
Image warp_image(const Image& src, const RectifyModel& model, WarpMode mode,
                 const WarpOptions& opt = {});

}  // namespace ctrect
