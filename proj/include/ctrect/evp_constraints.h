#pragma once

// Constraint evaluators for the eliminated-vanishing-point formulation. They
// are never solved here; tests use them as independent checks of synthetic
// ground truth.

#include <Eigen/Core>

#include <span>

#include "ctrect/evl_solver.h"
#include "ctrect/geom.h"

namespace ctrect {

// [f(x~', lambda)]_x (I + sbar u l^T) f(x~, lambda).
Vec3 evp_constraint_residuals(const Vec3& l, const Vec3& u, double sbar, double lambda,
                              const Correspondence& c);

// 7x4 matrix acting on (u1, u2, u3, 1). Rows: third and second skew rows of
// the first two correspondences (interleaved as 1:3, 2:3, 1:2, 2:2), then of
// the third correspondence (with relative scale sbar3), then (l1, l2, 1, 0).
Eigen::Matrix<double, 7, 4> evp_matrix_eval(double l1, double l2, double sbar3, double lambda,
                                            std::span<const Correspondence> corrs);

}  // namespace ctrect
