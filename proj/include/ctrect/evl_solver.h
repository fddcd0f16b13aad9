#pragma once

// Eliminated-vanishing-line minimal solver. Three radially-distorted
// conjugately-translated point correspondences (one affine frame and its
// translated copy) give up to six meets of joins; any admissible choice of
// three of them yields a 3x3 matrix M(lambda) whose rows are vanishing points
// as polynomials in lambda. det M(lambda) = 0 is a quartic; the vanishing line
// is the null vector of M at each real root.

#include <array>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctrect/geom.h"
#include "ctrect/polynomial.h"

namespace ctrect {

enum class ScaleClass { kUnit, kUnknown };

struct Correspondence {
  PointH pd;        // distorted, normalized, w = 1
  PointH pd_prime;  // its translated copy
  int frame_id = 0;
  int direction_id = 0;
  ScaleClass scale_class = ScaleClass::kUnit;
};

// One row of M(lambda).
//  kIntra (V_ij): meet of join(x_i, x_j) and join(x'_i, x'_j).
//  kCross (U_ij): meet of join(x_i, x'_i) and join(x_j, x'_j).
struct MeetRow {
  enum class Kind { kIntra, kCross };
  Kind kind = Kind::kIntra;
  int i = 0;  // 0-based, i < j
  int j = 1;

  friend bool operator==(const MeetRow&, const MeetRow&) = default;
};

struct MeetSelection {
  std::array<MeetRow, 3> rows;

  int cross_rows() const;
  std::string tag() const;  // e.g. "V12,V13,U23"
  friend bool operator==(const MeetSelection&, const MeetSelection&) = default;
};

struct DirectionVp {
  int direction_id = 0;
  PointH u;
};

struct RectifyModel {
  LineH l;  // l3 = 1
  double lambda = 0.0;
  // Vanishing point(s) of the translation direction(s); empty until recovered.
  std::vector<DirectionVp> vps;
  std::optional<MeetSelection> selection;
  std::string provenance;
  // Sum of symmetric transfer errors (normalized units^2), NaN if unscored.
  double score = std::numeric_limits<double>::quiet_NaN();

  const PointH* vp(int direction_id) const;
  const PointH* primary_vp() const { return vps.empty() ? nullptr : &vps.front().u; }
};

struct SolverOptions {
  Interval feasible{};
  // Rows whose meet is smaller than this fraction of the product of the join
  // norms are treated as degenerate (coincident joins).
  double degenerate_row_tol = 1e-10;
  // det M with all coefficients below this (rows scaled to unit max
  // coefficient) is treated as identically zero.
  double zero_det_tol = 1e-12;
  // Candidates with |l3| / ||l|| below this are rejected.
  double min_l3 = 1e-8;
};

using MeetRowPolys = std::array<Poly, 3>;

MeetRowPolys meet_row(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2);

using PolyMatrix = std::array<MeetRowPolys, 3>;

// Throws Error(kDegenerateSelection) when a row is (numerically) zero.
PolyMatrix build_M(std::span<const Correspondence> corrs, const MeetSelection& sel,
                   const SolverOptions& opt = {});
Poly determinant(const PolyMatrix& M);
Mat3 evaluate(const PolyMatrix& M, double lambda);

// All 10 admissible selections: {V12,V13,V23} first, then every pair of
// intra rows combined with one cross row, in lexicographic order.
const std::array<MeetSelection, 10>& enumerate_selections();

// Candidates for one selection (possibly empty). Throws
// kDegenerateSelection, kIdenticallyZeroDeterminant or kNoFeasibleRoot.
std::vector<RectifyModel> solve_one(std::span<const Correspondence> corrs,
                                    const MeetSelection& sel, const SolverOptions& opt = {});

enum class SolveStatus {
  kOk,
  kDegenerateSelection,
  kIdenticallyZeroDeterminant,
  kNoFeasibleRoot,
};

// Non-throwing variant for inner loops; returns the number of candidates
// written to `out`.
struct Candidate {
  double lambda;
  Vec3 l;  // l3 = 1
};
SolveStatus solve_one_into(std::span<const Correspondence> corrs, const MeetSelection& sel,
                           const SolverOptions& opt, std::array<Candidate, 4>& out,
                           int& count);

// Best minimal solution selection: every selection and root is completed with
// a vanishing point and scored by the symmetric transfer error over all
// correspondences; the smallest score wins, ties go to the smaller |lambda|.
// Throws Error(kNoValidModel).
RectifyModel solve_best(std::span<const Correspondence> corrs, const SolverOptions& opt = {});

// Every scored candidate across all selections, ascending by score.
std::vector<RectifyModel> solve_all(std::span<const Correspondence> corrs,
                                    const SolverOptions& opt = {});

// Baseline: one selection drawn uniformly, then the candidate with the
// smallest |lambda|. Throws the solve_one errors.
RectifyModel solve_random(std::span<const Correspondence> corrs, std::mt19937_64& rng,
                          const SolverOptions& opt = {});

}  // namespace ctrect
