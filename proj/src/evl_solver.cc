#include "ctrect/evl_solver.h"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "ctrect/errors.h"
#include "ctrect/metrics.h"
#include "ctrect/vanishing_point.h"

namespace ctrect {

namespace {

using PolyVec = std::array<Poly, 3>;

// f(x~, lambda) as a polynomial vector in lambda.
PolyVec lift(const Vec2& a) {
  return {Poly({a.x()}), Poly({a.y()}), Poly({1.0, a.squaredNorm()})};
}

PolyVec cross(const PolyVec& a, const PolyVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double max_abs(const PolyVec& v) {
  return std::max({v[0].max_abs_coeff(), v[1].max_abs_coeff(), v[2].max_abs_coeff()});
}

// Meet row with its degeneracy measure |meet| / (|join1| |join2|), all norms
// taken over coefficients.
struct RowBuild {
  PolyVec row;
  double relative = 0.0;
};

RowBuild build_row(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
  const PolyVec L = cross(lift(a1), lift(a2));
  const PolyVec M = cross(lift(b1), lift(b2));
  RowBuild out;
  out.row = cross(L, M);
  const double denom = max_abs(L) * max_abs(M);
  out.relative = denom > 0.0 ? max_abs(out.row) / denom : 0.0;
  // Trim the nominal degrees to (1, 1, 2).
  for (int k = 0; k < 3; ++k) {
    Poly p;
    const int deg = k < 2 ? 1 : 2;
    for (int i = 0; i <= deg; ++i) p.set(i, out.row[k][i]);
    out.row[k] = p;
  }
  return out;
}

bool build_normalized(std::span<const Correspondence> corrs, const MeetSelection& sel,
                      const SolverOptions& opt, PolyMatrix& M) {
  for (int k = 0; k < 3; ++k) {
    const MeetRow& r = sel.rows[k];
    const Vec2 xi = corrs[r.i].pd.h.head<2>();
    const Vec2 xj = corrs[r.j].pd.h.head<2>();
    const Vec2 xpi = corrs[r.i].pd_prime.h.head<2>();
    const Vec2 xpj = corrs[r.j].pd_prime.h.head<2>();
    const RowBuild b = r.kind == MeetRow::Kind::kIntra ? build_row(xi, xj, xpi, xpj)
                                                       : build_row(xi, xpi, xj, xpj);
    if (!(b.relative >= opt.degenerate_row_tol)) return false;
    const double s = 1.0 / max_abs(b.row);
    for (int c = 0; c < 3; ++c) M[k][c] = b.row[c].scaled(s);
  }
  return true;
}

// Null vector of a rank-2 matrix; nullopt when the rank is at most one and the
// line is undetermined.
std::optional<Vec3> null_vector(const Mat3& M) {
  const Vec3 c01 = M.row(0).cross(M.row(1)).transpose();
  const Vec3 c02 = M.row(0).cross(M.row(2)).transpose();
  const Vec3 c12 = M.row(1).cross(M.row(2)).transpose();
  const double n01 = c01.squaredNorm();
  const double n02 = c02.squaredNorm();
  const double n12 = c12.squaredNorm();
  const double best = std::max({n01, n02, n12});
  if (std::sqrt(best) >= 1e-12) {
    if (best == n01) return c01;
    if (best == n02) return c02;
    return c12;
  }
  const Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv[1] > 1e-12 * sv[0])) return std::nullopt;
  return Vec3(svd.matrixV().col(2));
}

constexpr double kResidualTol = 1e-8;

int candidates_from_roots(const PolyMatrix& M, const std::array<double, Poly::kMaxDegree>& roots,
                          int n_roots, const SolverOptions& opt, std::array<Candidate, 4>& out) {
  int count = 0;
  for (int i = 0; i < n_roots && count < 4; ++i) {
    const double lambda = roots[i];
    const Mat3 Ml = evaluate(M, lambda);
    const std::optional<Vec3> nv = null_vector(Ml);
    if (!nv) continue;
    const Vec3& n = *nv;
    if (!n.allFinite() || !(std::abs(n.z()) >= opt.min_l3 * n.norm())) continue;
    const Vec3 l = n / n.z();
    if (!((Ml * l).norm() <= kResidualTol * Ml.norm())) continue;
    out[count++] = {lambda, l};
  }
  return count;
}

bool better(double score, double lambda, double best_score, double best_lambda) {
  const double tie = 1e-12 * std::max(std::abs(score), std::abs(best_score));
  if (std::abs(score - best_score) <= tie) return std::abs(lambda) < std::abs(best_lambda);
  return score < best_score;
}

int direction_of(std::span<const Correspondence> corrs) {
  return corrs.empty() ? 0 : corrs.front().direction_id;
}

}  // namespace

const PointH* RectifyModel::vp(int direction_id) const {
  for (const DirectionVp& d : vps) {
    if (d.direction_id == direction_id) return &d.u;
  }
  return nullptr;
}

int MeetSelection::cross_rows() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const MeetRow& r) {
    return r.kind == MeetRow::Kind::kCross;
  }));
}

std::string MeetSelection::tag() const {
  std::string s;
  for (const MeetRow& r : rows) {
    if (!s.empty()) s += ',';
    s += r.kind == MeetRow::Kind::kIntra ? 'V' : 'U';
    s += std::to_string(r.i + 1);
    s += std::to_string(r.j + 1);
  }
  return s;
}

MeetRowPolys meet_row(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
  return build_row(a1, a2, b1, b2).row;
}

PolyMatrix build_M(std::span<const Correspondence> corrs, const MeetSelection& sel,
                   const SolverOptions& opt) {
  if (corrs.size() < 3) {
    throw Error(ErrorCode::kDegenerateSelection, "the solver needs three correspondences");
  }
  PolyMatrix M;
  if (!build_normalized(corrs, sel, opt, M)) {
    throw Error(ErrorCode::kDegenerateSelection,
                "selection " + sel.tag() + " has a degenerate meet row");
  }
  return M;
}

Poly determinant(const PolyMatrix& M) {
  const PolyVec c = cross(M[1], M[2]);
  return M[0][0] * c[0] + M[0][1] * c[1] + M[0][2] * c[2];
}

Mat3 evaluate(const PolyMatrix& M, double lambda) {
  Mat3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out(r, c) = M[r][c](lambda);
  }
  return out;
}

const std::array<MeetSelection, 10>& enumerate_selections() {
  static const std::array<MeetSelection, 10> kSelections = [] {
    using K = MeetRow::Kind;
    const std::array<MeetRow, 3> intra{MeetRow{K::kIntra, 0, 1}, MeetRow{K::kIntra, 0, 2},
                                       MeetRow{K::kIntra, 1, 2}};
    const std::array<MeetRow, 3> cross_rows{MeetRow{K::kCross, 0, 1}, MeetRow{K::kCross, 0, 2},
                                            MeetRow{K::kCross, 1, 2}};
    std::array<MeetSelection, 10> out;
    out[0] = MeetSelection{intra};
    int k = 1;
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        for (const MeetRow& u : cross_rows) out[k++] = MeetSelection{{intra[a], intra[b], u}};
      }
    }
    return out;
  }();
  return kSelections;
}

SolveStatus solve_one_into(std::span<const Correspondence> corrs, const MeetSelection& sel,
                           const SolverOptions& opt, std::array<Candidate, 4>& out,
                           int& count) {
  count = 0;
  PolyMatrix M;
  if (corrs.size() < 3 || !build_normalized(corrs, sel, opt, M)) {
    return SolveStatus::kDegenerateSelection;
  }
  std::array<double, Poly::kMaxDegree> roots;
  const int n_roots = real_roots_into(determinant(M), opt.feasible, opt.zero_det_tol, roots);
  if (n_roots < 0) return SolveStatus::kIdenticallyZeroDeterminant;
  if (n_roots == 0) return SolveStatus::kNoFeasibleRoot;
  count = candidates_from_roots(M, roots, n_roots, opt, out);
  return SolveStatus::kOk;
}

std::vector<RectifyModel> solve_one(std::span<const Correspondence> corrs,
                                    const MeetSelection& sel, const SolverOptions& opt) {
  std::array<Candidate, 4> cands;
  int count = 0;
  switch (solve_one_into(corrs, sel, opt, cands, count)) {
    case SolveStatus::kDegenerateSelection:
      throw Error(ErrorCode::kDegenerateSelection,
                  "selection " + sel.tag() + " has a degenerate meet row");
    case SolveStatus::kIdenticallyZeroDeterminant:
      throw Error(ErrorCode::kIdenticallyZeroDeterminant,
                  "det M(lambda) vanishes identically for selection " + sel.tag());
    case SolveStatus::kNoFeasibleRoot:
      throw Error(ErrorCode::kNoFeasibleRoot,
                  "no real root of det M(lambda) in the feasible interval");
    case SolveStatus::kOk:
      break;
  }
  std::vector<RectifyModel> models;
  for (int i = 0; i < count; ++i) {
    RectifyModel m;
    m.l = LineH(cands[i].l);
    m.lambda = cands[i].lambda;
    m.selection = sel;
    m.provenance = "evl:" + sel.tag();
    models.push_back(std::move(m));
  }
  return models;
}

std::vector<RectifyModel> solve_all(std::span<const Correspondence> corrs,
                                    const SolverOptions& opt) {
  std::vector<RectifyModel> out;
  const int dir = direction_of(corrs);
  for (const MeetSelection& sel : enumerate_selections()) {
    std::array<Candidate, 4> cands;
    int count = 0;
    if (solve_one_into(corrs, sel, opt, cands, count) != SolveStatus::kOk) continue;
    for (int i = 0; i < count; ++i) {
      const auto u = try_recover_vp(cands[i].l, cands[i].lambda, corrs);
      if (!u) continue;
      RectifyModel m;
      m.l = LineH(cands[i].l);
      m.lambda = cands[i].lambda;
      m.vps.push_back({dir, PointH(*u)});
      m.selection = sel;
      m.provenance = "evl:" + sel.tag();
      m.score = symm_transfer_error(cands[i].l, cands[i].lambda, *u, corrs);
      out.push_back(std::move(m));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RectifyModel& a, const RectifyModel& b) {
    return better(a.score, a.lambda, b.score, b.lambda);
  });
  return out;
}

RectifyModel solve_best(std::span<const Correspondence> corrs, const SolverOptions& opt) {
  bool found = false;
  double best_score = 0.0;
  Candidate best{0.0, Vec3::Zero()};
  Vec3 best_u = Vec3::Zero();
  int best_sel = 0;
  const auto& selections = enumerate_selections();
  for (int s = 0; s < static_cast<int>(selections.size()); ++s) {
    std::array<Candidate, 4> cands;
    int count = 0;
    if (solve_one_into(corrs, selections[s], opt, cands, count) != SolveStatus::kOk) continue;
    for (int i = 0; i < count; ++i) {
      const auto u = try_recover_vp(cands[i].l, cands[i].lambda, corrs);
      if (!u) continue;
      const double score = symm_transfer_error(cands[i].l, cands[i].lambda, *u, corrs);
      if (!std::isfinite(score)) continue;
      if (!found || better(score, cands[i].lambda, best_score, best.lambda)) {
        found = true;
        best_score = score;
        best = cands[i];
        best_u = *u;
        best_sel = s;
      }
    }
  }
  if (!found) {
    throw Error(ErrorCode::kNoValidModel, "no selection produced a valid model");
  }
  RectifyModel m;
  m.l = LineH(best.l);
  m.lambda = best.lambda;
  m.vps.push_back({direction_of(corrs), PointH(best_u)});
  m.selection = selections[best_sel];
  m.provenance = "evl_best:" + selections[best_sel].tag();
  m.score = best_score;
  return m;
}

RectifyModel solve_random(std::span<const Correspondence> corrs, std::mt19937_64& rng,
                          const SolverOptions& opt) {
  const auto& selections = enumerate_selections();
  const int s = std::uniform_int_distribution<int>(0, static_cast<int>(selections.size()) - 1)(rng);
  std::vector<RectifyModel> cands = solve_one(corrs, selections[s], opt);
  std::stable_sort(cands.begin(), cands.end(), [](const RectifyModel& a, const RectifyModel& b) {
    return std::abs(a.lambda) < std::abs(b.lambda);
  });
  for (RectifyModel& m : cands) {
    const auto u = try_recover_vp(m.l.h, m.lambda, corrs);
    if (!u) continue;
    m.vps.push_back({direction_of(corrs), PointH(*u)});
    m.provenance = "evl_random:" + selections[s].tag();
    m.score = symm_transfer_error(m.l.h, m.lambda, *u, corrs);
    return m;
  }
  throw Error(ErrorCode::kNoValidModel,
              "selection " + selections[s].tag() + " produced no usable candidate");
}

}  // namespace ctrect
