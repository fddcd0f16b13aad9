#include "ctrect/ransac.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ctrect/errors.h"
#include "ctrect/metrics.h"
#include "ctrect/parallel.h"

namespace ctrect {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Frame {
  int frame_id;
  std::array<Correspondence, 3> corrs;
};

std::vector<Frame> complete_frames(std::span<const Correspondence> pool) {
  std::vector<int> ids;
  for (const Correspondence& c : pool) {
    if (std::find(ids.begin(), ids.end(), c.frame_id) == ids.end()) ids.push_back(c.frame_id);
  }
  std::vector<Frame> frames;
  for (int id : ids) {
    Frame f{id, {}};
    int n = 0;
    for (const Correspondence& c : pool) {
      if (c.frame_id != id) continue;
      if (n < 3) f.corrs[n] = c;
      ++n;
    }
    if (n >= 3) frames.push_back(f);
  }
  return frames;
}

double finite_or_inf(double v) { return std::isnan(v) ? kInf : v; }

double safe_warp(const RectifyModel& m, const GroundTruthScene& gt) {
  try {
    return finite_or_inf(warp_error(m, gt));
  } catch (const Error&) {
    return kInf;
  }
}

double safe_transfer(const RectifyModel& m, const GroundTruthScene& gt) {
  try {
    return finite_or_inf(transfer_error(m, gt));
  } catch (const Error&) {
    return kInf;
  }
}

struct Score {
  bool valid = false;
  double primary = kInf;    // lower is better
  double secondary = kInf;  // tie-break
  int inliers = 0;
  double warp = kNaN;  // cached when already computed
};

bool operator<(const Score& a, const Score& b) {
  if (a.primary != b.primary) return a.primary < b.primary;
  return a.secondary < b.secondary;
}

Score score_hypothesis(const RectifyModel& m, std::span<const Correspondence> pool,
                       const RansacConfig& cfg, const GroundTruthScene* gt) {
  Score s;
  s.valid = true;
  switch (cfg.scoring) {
    case Scoring::kWarpOracle:
      s.primary = s.warp = safe_warp(m, *gt);
      break;
    case Scoring::kTransferOracle:
      s.primary = safe_transfer(m, *gt);
      break;
    case Scoring::kLambdaOracle:
      s.primary = finite_or_inf(lambda_rel_error(m.lambda, gt->camera.lambda).value);
      break;
    case Scoring::kConsensus: {
      const double thr2 = cfg.inlier_threshold * cfg.inlier_threshold;
      double err = 0.0;
      for (const Correspondence& c : pool) {
        const PointH* u = m.vp(c.direction_id);
        if (u == nullptr) u = m.primary_vp();
        if (u == nullptr) continue;
        const double e = symm_transfer_error(m.l.h, m.lambda, u->h, c);
        if (e <= thr2) {
          ++s.inliers;
          err += e;
        }
      }
      s.primary = -static_cast<double>(s.inliers);
      s.secondary = err;
      break;
    }
  }
  return s;
}

}  // namespace

MinimalSolver make_solver(SolverKind kind, const SolverOptions& opt) {
  if (kind == SolverKind::kBest) {
    return [opt](std::span<const Correspondence> c, std::mt19937_64&) {
      return solve_best(c, opt);
    };
  }
  return [opt](std::span<const Correspondence> c, std::mt19937_64& rng) {
    return solve_random(c, rng, opt);
  };
}

void RansacConfig::validate() const {
  if (iterations < 1) throw Error(ErrorCode::kSchemaViolation, "iterations must be >= 1");
  if (!(inlier_threshold > 0.0)) {
    throw Error(ErrorCode::kSchemaViolation, "inlier threshold must be positive");
  }
}

std::vector<Hypothesis> generate_hypotheses(std::span<const Correspondence> pool,
                                           const MinimalSolver& solver, int iterations,
                                           std::uint64_t seed, int workers) {
  const std::vector<Frame> frames = complete_frames(pool);
  if (frames.empty()) {
    throw Error(ErrorCode::kNoModelFound, "the pool has no frame with three correspondences");
  }
  std::vector<Hypothesis> hyps(iterations);
  parallel_for(
      hyps.size(),
      [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        const auto k = std::uniform_int_distribution<std::size_t>(0, frames.size() - 1)(rng);
        Hypothesis& h = hyps[i];
        h.iteration = static_cast<int>(i);
        h.frame_id = frames[k].frame_id;
        try {
          h.model = solver(frames[k].corrs, rng);
        } catch (const Error&) {
          h.model.reset();
        }
      },
      workers);
  return hyps;
}

RansacResult run_fixed(const MinimalSolver& solver, std::span<const Correspondence> pool,
                       const RansacConfig& cfg, const GroundTruthScene* gt) {
  cfg.validate();
  if (cfg.scoring != Scoring::kConsensus && gt == nullptr) {
    throw Error(ErrorCode::kSchemaViolation, "oracle scoring needs a ground-truth scene");
  }
  const std::vector<Hypothesis> hyps =
      generate_hypotheses(pool, solver, cfg.iterations, cfg.seed, cfg.workers);

  std::vector<Score> scores(hyps.size());
  parallel_for(
      hyps.size(),
      [&](std::size_t i) {
        const auto& m = hyps[i].model;
        if (!m) return;
        if (cfg.preemption_threshold && !(m->score <= *cfg.preemption_threshold)) return;
        scores[i] = score_hypothesis(*m, pool, cfg, gt);
      },
      cfg.workers);

  RansacResult result;
  int best = -1;
  TraceRow running{0, kNaN, kNaN, kNaN, kNaN};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (scores[i].valid && (best < 0 || scores[i] < scores[best])) {
      best = static_cast<int>(i);
      const RectifyModel& m = *hyps[i].model;
      running.score = cfg.scoring == Scoring::kConsensus ? scores[i].inliers : scores[i].primary;
      running.lambda_hat = m.lambda;
      if (gt != nullptr) {
        running.warp_error = std::isnan(scores[i].warp) ? safe_warp(m, *gt) : scores[i].warp;
        running.transfer_error = safe_transfer(m, *gt);
      }
    }
    running.iteration = static_cast<int>(i);
    result.trace.push_back(running);
  }
  if (best < 0) throw Error(ErrorCode::kNoModelFound, "no iteration produced a model");
  result.model = *hyps[best].model;
  result.score = result.trace.back().score;
  result.inliers = scores[best].inliers;
  return result;
}

std::vector<bool> consensus_set(const RectifyModel& model, std::span<const Correspondence> pool,
                                double threshold) {
  std::vector<bool> mask(pool.size(), false);
  const double thr2 = threshold * threshold;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const PointH* u = model.vp(pool[i].direction_id);
    if (u == nullptr) u = model.primary_vp();
    if (u == nullptr) continue;
    mask[i] = symm_transfer_error(model.l.h, model.lambda, u->h, pool[i]) <= thr2;
  }
  return mask;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace) {
  os << "# ctrect ransac trace, format_version 1\n";
  os << "iteration,score,warp_error,transfer_error,lambda_hat\n";
  os.precision(17);
  for (const TraceRow& r : trace) {
    os << r.iteration << ',' << r.score << ',' << r.warp_error << ',' << r.transfer_error << ','
       << r.lambda_hat << '\n';
  }
}

}  // namespace ctrect
