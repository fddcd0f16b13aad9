#include "ctrect/vanishing_point.h"

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "ctrect/errors.h"

namespace ctrect {

namespace {

struct KktSolve {
  Vec3 u;
  int used = 0;
  int excluded = 0;
  double rcond = 0.0;
  double residual = 0.0;
};

KktSolve solve_kkt(const Vec3& l, double lambda, std::span<const Correspondence> corrs) {
  KktSolve out;
  Eigen::Matrix3d MtM = Eigen::Matrix3d::Zero();
  Vec3 Mty = Vec3::Zero();
  // Rows kept to evaluate the residual directly; the expanded form
  // u^T MtM u - 2 u^T Mty + y^T y cancels catastrophically near zero.
  std::vector<std::pair<Vec3, double>> rows;
  rows.reserve(2 * corrs.size());
  for (const Correspondence& c : corrs) {
    const Vec3 xh = undistort(c.pd.h.head<2>(), lambda);
    const Vec3 xph = undistort(c.pd_prime.h.head<2>(), lambda);
    if (!(std::abs(xh.z()) > kEpsW * xh.norm()) || !(std::abs(xph.z()) > kEpsW * xph.norm())) {
      ++out.excluded;
      continue;
    }
    const Vec3 x = xh / xh.z();
    const Vec3 xp = xph / xph.z();
    const double lx = l.dot(x);
    const Vec3 r1(lx, 0.0, -xp.x() * lx);
    const Vec3 r2(0.0, lx, -xp.y() * lx);
    const double y1 = xp.x() - x.x();
    const double y2 = xp.y() - x.y();
    MtM += r1 * r1.transpose() + r2 * r2.transpose();
    Mty += r1 * y1 + r2 * y2;
    rows.emplace_back(r1, y1);
    rows.emplace_back(r2, y2);
    ++out.used;
  }
  if (out.used < 2) return out;

  Eigen::Matrix4d K;
  K.topLeftCorner<3, 3>() = MtM;
  K.block<3, 1>(0, 3) = l;
  K.block<1, 3>(3, 0) = l.transpose();
  K(3, 3) = 0.0;
  Eigen::Vector4d rhs;
  rhs << Mty, 0.0;
  const Eigen::PartialPivLU<Eigen::Matrix4d> lu(K);
  out.rcond = lu.rcond();
  const Eigen::Vector4d sol = lu.solve(rhs);
  out.u = sol.head<3>();
  double r2 = 0.0;
  for (const auto& [row, y] : rows) r2 += (row.dot(out.u) - y) * (row.dot(out.u) - y);
  out.residual = std::sqrt(r2);
  return out;
}

constexpr double kMinRcond = 1e-12;

}  // namespace

VpEstimate recover_vp_detailed(const LineH& l, double lambda,
                               std::span<const Correspondence> corrs) {
  const KktSolve s = solve_kkt(l.h, lambda, corrs);
  if (s.used < 2) {
    throw Error(ErrorCode::kRankDeficient,
                "vanishing point recovery needs at least two finite correspondences");
  }
  if (!(s.rcond > kMinRcond) || !s.u.allFinite()) {
    throw Error(ErrorCode::kRankDeficient, "vanishing point KKT system is ill-conditioned");
  }
  VpEstimate est;
  est.u = PointH(s.u);
  est.excluded = s.excluded;
  est.residual = s.residual;
  return est;
}

PointH recover_vp(const LineH& l, double lambda, std::span<const Correspondence> corrs) {
  return recover_vp_detailed(l, lambda, corrs).u;
}

std::optional<Vec3> try_recover_vp(const Vec3& l, double lambda,
                                   std::span<const Correspondence> corrs) {
  const KktSolve s = solve_kkt(l, lambda, corrs);
  if (s.used < 2 || !(s.rcond > kMinRcond) || !s.u.allFinite()) return std::nullopt;
  return s.u;
}

}  // namespace ctrect
