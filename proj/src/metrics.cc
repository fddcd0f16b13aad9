#include "ctrect/metrics.h"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "ctrect/errors.h"

namespace ctrect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kPolishIterations = 5;

using Mat23 = Eigen::Matrix<double, 2, 3>;

// Image of the plane point (A * (r, 1)) through the ground-truth camera, with
// the 2x6 Jacobian with respect to the row-major entries of A.
struct Projection {
  Vec2 x;
  Eigen::Matrix<double, 2, 6> J;
};

std::optional<Projection> project(const Mat3& P, double lambda, const Mat23& A, const Vec2& r,
                                  bool with_jacobian) {
  const Vec3 rh(r.x(), r.y(), 1.0);
  const Vec2 X = A * rh;
  const Vec3 q = P * Vec3(X.x(), X.y(), 1.0);
  if (!(std::abs(q.z()) > kEpsW * q.norm())) return std::nullopt;
  const Vec2 p = q.head<2>() / q.z();
  const double rho = p.squaredNorm();
  const double disc = 1.0 - 4.0 * lambda * rho;
  if (!(disc > 0.0)) return std::nullopt;
  const double s = std::sqrt(disc);
  const double k = 2.0 / (1.0 + s);
  Projection out;
  out.x = k * p;
  if (!with_jacobian) return out;

  const double dk = 4.0 * lambda / (s * (1.0 + s) * (1.0 + s));
  const Eigen::Matrix2d Jd = k * Eigen::Matrix2d::Identity() + 2.0 * dk * p * p.transpose();
  Eigen::Matrix<double, 2, 3> Jp;
  Jp << 1.0 / q.z(), 0.0, -p.x() / q.z(),
        0.0, 1.0 / q.z(), -p.y() / q.z();
  const Eigen::Matrix<double, 2, 3> JdJp = Jd * Jp;
  for (int row = 0; row < 2; ++row) {
    const Vec2 col = JdJp * P.col(row);
    for (int k3 = 0; k3 < 3; ++k3) out.J.col(3 * row + k3) = col * rh[k3];
  }
  return out;
}

double warp_cost(const Mat3& P, double lambda, const Mat23& A, const std::vector<Vec2>& rect,
                 const std::vector<Vec2>& target) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rect.size(); ++i) {
    const auto pr = project(P, lambda, A, rect[i], false);
    if (!pr) return kInf;
    sum += (pr->x - target[i]).squaredNorm();
  }
  return sum;
}

}  // namespace

std::vector<Vec2> plane_tessellation(double extent, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  const double step = extent / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pts.emplace_back(-0.5 * extent + (i + 0.5) * step, -0.5 * extent + (j + 0.5) * step);
    }
  }
  return pts;
}

WarpFit warp_fit(const Mat3& H_rect, double lambda_hat, const GroundTruthScene& gt) {
  const Mat3& P = gt.camera.P;
  const double lambda = gt.camera.lambda;
  const std::vector<Vec2> grid = plane_tessellation(gt.config.plane_extent);
  const int n = static_cast<int>(grid.size());

  WarpFit fit;
  std::vector<Vec2> target(n);
  std::vector<Vec2> rect(n);
  for (int i = 0; i < n; ++i) {
    const auto xd = try_distort(Vec3(P * Vec3(grid[i].x(), grid[i].y(), 1.0)), lambda);
    if (!xd) throw Error(ErrorCode::kNoRealPreimage, "ground-truth grid point has no image");
    target[i] = *xd;
    const Vec3 r = H_rect * undistort(*xd, lambda_hat);
    if (!(std::abs(r.z()) > kEpsW * r.norm()) || !r.allFinite()) {
      fit.rms_px = kInf;
      fit.unrectifiable = true;
      return fit;
    }
    rect[i] = r.head<2>() / r.z();
  }

  // Linear surrogate: plane coordinates ~ A (r, 1).
  Eigen::MatrixXd D(n, 3);
  Eigen::MatrixXd B(n, 2);
  for (int i = 0; i < n; ++i) {
    D.row(i) << rect[i].x(), rect[i].y(), 1.0;
    B.row(i) = grid[i].transpose();
  }
  Mat23 A = D.colPivHouseholderQr().solve(B).transpose();

  double cost = warp_cost(P, lambda, A, rect, target);
  for (int it = 0; it < kPolishIterations && std::isfinite(cost); ++it) {
    Eigen::Matrix<double, 6, 6> JtJ = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> Jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (int i = 0; i < n; ++i) {
      const auto pr = project(P, lambda, A, rect[i], true);
      const Vec2 res = pr->x - target[i];
      JtJ += pr->J.transpose() * pr->J;
      Jtr += pr->J.transpose() * res;
    }
    const Eigen::Matrix<double, 6, 1> step = JtJ.ldlt().solve(-Jtr);
    if (!step.allFinite()) break;
    bool improved = false;
    for (double t = 1.0; t > 1e-3 && !improved; t *= 0.5) {
      Mat23 A_new = A;
      for (int k = 0; k < 6; ++k) A_new(k / 3, k % 3) += t * step[k];
      const double c = warp_cost(P, lambda, A_new, rect, target);
      if (c < cost) {
        A = A_new;
        cost = c;
        improved = true;
      }
    }
    if (!improved) break;
  }

  fit.A.topRows<2>() = A;
  fit.rms_px = std::sqrt(cost / n) / gt.image.norm_scale;
  return fit;
}

double warp_error_for_rectifier(const Mat3& H_rect, double lambda_hat,
                                const GroundTruthScene& gt) {
  return warp_fit(H_rect, lambda_hat, gt).rms_px;
}

double warp_error(const RectifyModel& model, const GroundTruthScene& gt) {
  Mat3 H = Mat3::Identity();
  H.row(2) = model.l.h.transpose();
  return warp_error_for_rectifier(H, model.lambda, gt);
}

Vec3 preimage_translation(const Vec3& l_hat, const Vec3& u_hat, const Mat3& P) {
  const Vec3 l_P = P.inverse().transpose() * Vec3::UnitZ();
  return P.inverse() * u_hat * (l_hat.dot(l_P) / l_P.squaredNorm());
}

double transfer_error(const RectifyModel& model, const GroundTruthScene& gt, int direction_id) {
  const PointH* u = model.vp(direction_id);
  if (u == nullptr) {
    throw Error(ErrorCode::kDegenerateU, "model has no vanishing point for the direction");
  }
  double sum = 0.0;
  int count = 0;
  const Vec3 U = preimage_translation(model.l.h, u->h, gt.camera.P);
  const double norm_U = U.head<2>().norm();
  if (!(norm_U >= 1e-10)) {
    throw Error(ErrorCode::kDegenerateU, "estimated translation has no scene-plane extent");
  }
  const Mat3 H_unit = Mat3::Identity() + u->h * model.l.h.transpose() / norm_U;
  const Vec2 t = gt.translations.at(direction_id);
  const Vec2 step = t / t.norm();
  const Mat3& P = gt.camera.P;
  const double lambda = gt.camera.lambda;

  for (const Vec2& X : plane_tessellation(gt.config.plane_extent)) {
    const Vec2 Xp = X + step;
    const auto xd = try_distort(Vec3(P * Vec3(X.x(), X.y(), 1.0)), lambda);
    const auto xdp = try_distort(Vec3(P * Vec3(Xp.x(), Xp.y(), 1.0)), lambda);
    if (!xd || !xdp) continue;
    const auto pred = try_distort(Vec3(H_unit * undistort(*xd, model.lambda)), model.lambda);
    if (!pred) return std::numeric_limits<double>::infinity();
    sum += (*pred - *xdp).squaredNorm();
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(sum / count) / gt.image.norm_scale;
}

double transfer_error(const RectifyModel& model, const GroundTruthScene& gt) {
  const int n_dir = static_cast<int>(gt.translations.size());
  double sum = 0.0;
  for (int d = 0; d < n_dir; ++d) {
    const double e = transfer_error(model, gt, d);
    sum += e * e;
  }
  // Every direction uses the same tessellation, so pooling the squared RMS
  // values weights each direction equally.
  return std::sqrt(sum / n_dir);
}

LambdaError lambda_rel_error(double lambda_hat, double lambda_gt) {
  if (lambda_gt == 0.0) return {std::abs(lambda_hat), true};
  return {std::abs(lambda_hat - lambda_gt) / std::abs(lambda_gt), false};
}

double symm_transfer_error(const Vec3& l, double lambda, const Vec3& u, const Correspondence& c) {
  const Vec2 xd = c.pd.h.head<2>();
  const Vec2 xdp = c.pd_prime.h.head<2>();
  const Vec3 x = undistort(xd, lambda);
  const Vec3 xp = undistort(xdp, lambda);

  double err = 0.0;
  const double denom = 1.0 + l.dot(u);
  std::optional<Vec2> back;
  if (std::abs(denom) > kEpsW) back = try_distort(Vec3(xp - u * (l.dot(xp) / denom)), lambda);
  err += back ? (xd - *back).squaredNorm() : kTransferSentinel;
  const auto fwd = try_distort(Vec3(x + u * l.dot(x)), lambda);
  err += fwd ? (*fwd - xdp).squaredNorm() : kTransferSentinel;
  return err;
}

double symm_transfer_error(const Vec3& l, double lambda, const Vec3& u,
                           std::span<const Correspondence> corrs) {
  double sum = 0.0;
  for (const Correspondence& c : corrs) sum += symm_transfer_error(l, lambda, u, c);
  return sum;
}

double symm_transfer_error(const RectifyModel& model, std::span<const Correspondence> corrs) {
  double sum = 0.0;
  for (const Correspondence& c : corrs) {
    const PointH* u = model.vp(c.direction_id);
    if (u == nullptr) u = model.primary_vp();
    if (u == nullptr) {
      sum += 2.0 * kTransferSentinel;
      continue;
    }
    sum += symm_transfer_error(model.l.h, model.lambda, u->h, c);
  }
  return sum;
}

}  // namespace ctrect
