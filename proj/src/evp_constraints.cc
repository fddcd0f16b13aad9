#include "ctrect/evp_constraints.h"

namespace ctrect {

namespace {

// Row `k` of [b]_x (a + sbar (l^T a) u) split into u-coefficients and the
// constant term.
Eigen::Matrix<double, 1, 4> skew_row(const Vec3& a, const Vec3& b, const Vec3& l, double sbar,
                                     int k) {
  const Mat3 S = skew(b);
  Eigen::Matrix<double, 1, 4> row;
  row.head<3>() = sbar * l.dot(a) * S.row(k);
  row[3] = S.row(k).dot(a);
  return row;
}

}  // namespace

Vec3 evp_constraint_residuals(const Vec3& l, const Vec3& u, double sbar, double lambda,
                              const Correspondence& c) {
  const Vec3 x = undistort(c.pd.h.head<2>(), lambda);
  const Vec3 xp = undistort(c.pd_prime.h.head<2>(), lambda);
  return skew(xp) * (x + sbar * u * l.dot(x));
}

Eigen::Matrix<double, 7, 4> evp_matrix_eval(double l1, double l2, double sbar3, double lambda,
                                            std::span<const Correspondence> corrs) {
  const Vec3 l(l1, l2, 1.0);
  Vec3 a[3];
  Vec3 b[3];
  for (int i = 0; i < 3; ++i) {
    a[i] = undistort(corrs[i].pd.h.head<2>(), lambda);
    b[i] = undistort(corrs[i].pd_prime.h.head<2>(), lambda);
  }
  Eigen::Matrix<double, 7, 4> M;
  M.row(0) = skew_row(a[0], b[0], l, 1.0, 2);
  M.row(1) = skew_row(a[1], b[1], l, 1.0, 2);
  M.row(2) = skew_row(a[0], b[0], l, 1.0, 1);
  M.row(3) = skew_row(a[1], b[1], l, 1.0, 1);
  M.row(4) = skew_row(a[2], b[2], l, sbar3, 2);
  M.row(5) = skew_row(a[2], b[2], l, sbar3, 1);
  M.row(6) << l1, l2, 1.0, 0.0;
  return M;
}

}  // namespace ctrect
