#pragma once

#include <optional>
#include <span>

#include "ctrect/evl_solver.h"
#include "ctrect/geom.h"

namespace ctrect {

struct VpEstimate {
  PointH u;
  // Correspondences dropped because a member undistorts to infinity.
  int excluded = 0;
  // ||M u - y|| of the least-squares system.
  double residual = 0.0;
};

// Vanishing point of the translation shared by `corrs`, given the vanishing
// line (l3 = 1) and division parameter. Solves
//   min ||M u - y||^2  s.t.  l^T u = 0
// through its 4x4 KKT system, where each correspondence x -> x' (undistorted,
// dehomogenized) contributes the rows
//   ( l^T x, 0, -x' l^T x ) u = x' - x
//   ( 0, l^T x, -y' l^T x ) u = y' - y
// obtained by eliminating the homogeneous scale from x' ~ (I + u l^T) x.
// Throws Error(kRankDeficient) when fewer than two correspondences survive or
// the KKT matrix condition number exceeds 1e12.
VpEstimate recover_vp_detailed(const LineH& l, double lambda,
                               std::span<const Correspondence> corrs);
PointH recover_vp(const LineH& l, double lambda, std::span<const Correspondence> corrs);

std::optional<Vec3> try_recover_vp(const Vec3& l, double lambda,
                                   std::span<const Correspondence> corrs);

}  // namespace ctrect
