#include "ctrect/bench.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "ctrect/errors.h"
#include "ctrect/metrics.h"
#include "ctrect/parallel.h"

namespace ctrect {

namespace {

// Shortest decimal that round-trips, so configured levels print as given.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kHypothesisStream = 0x5eed;

const std::array<const char*, 4> kMetrics{"warp_error", "transfer_error", "lambda_rel_error",
                                          "lambda_hat"};

double safe_metric(const auto& fn) {
  try {
    const double v = fn();
    return std::isnan(v) ? kInf : v;
  } catch (const Error&) {
    return kInf;
  }
}

TimingStats timing_stats(std::vector<double> us) {
  TimingStats s;
  s.n = static_cast<int>(us.size());
  if (us.empty()) return s;
  s.median_us = quantile(us, 0.5);
  s.p95_us = quantile(us, 0.95);
  double sum = 0.0;
  for (double v : us) sum += v;
  s.mean_us = sum / us.size();
  double var = 0.0;
  for (double v : us) var += (v - s.mean_us) * (v - s.mean_us);
  s.stddev_us = us.size() > 1 ? std::sqrt(var / (us.size() - 1)) : 0.0;
  return s;
}

void write_header(std::ostream& os, const char* study) {
  os << "# ctrect " << study << ", format_version 1\n";
  os.precision(17);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double t = pos - k;
  if (k + 1 >= values.size() || t == 0.0 || values[k] == values[k + 1]) return values[k];
  return values[k] + t * (values[k + 1] - values[k]);
}

BoxStats box_stats(std::span<const double> values) {
  BoxStats b;
  b.n = static_cast<int>(values.size());
  if (values.empty()) return b;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  b.median = quantile(v, 0.5);
  b.q1 = quantile(v, 0.25);
  b.q3 = quantile(v, 0.75);
  b.iqr = b.q3 - b.q1;
  const double lo = b.q1 - 1.5 * b.iqr;
  const double hi = b.q3 + 1.5 * b.iqr;
  b.whisker_lo = *std::find_if(v.begin(), v.end(), [&](double x) { return x >= lo; });
  b.whisker_hi = *std::find_if(v.rbegin(), v.rend(), [&](double x) { return x <= hi; });
  return b;
}

const char* solver_name(SolverKind kind) {
  return kind == SolverKind::kBest ? "best" : "random";
}

std::vector<StabilityRow> study_stability(int n_scenes, std::uint64_t seed, int workers) {
  SceneConfig cfg;
  cfg.lambda = LambdaSpec::uniform(-6.0, 0.0);
  cfg.frames = 1;
  std::vector<StabilityRow> rows(n_scenes);
  parallel_for(
      rows.size(),
      [&](std::size_t i) {
        const GroundTruthScene scene = gen_scene(cfg, derive_seed(seed, i));
        StabilityRow& r = rows[i];
        r.scene = static_cast<int>(i);
        r.lambda_gt = scene.camera.lambda;
        r.lambda_hat = std::numeric_limits<double>::quiet_NaN();
        r.warp_error = kInf;
        try {
          const RectifyModel m = solve_best(scene.clean);
          r.solved = true;
          r.lambda_hat = m.lambda;
          r.warp_error = safe_metric([&] { return warp_error(m, scene); });
        } catch (const Error&) {
          r.solved = false;
        }
        r.log10_warp = std::log10(std::max(r.warp_error, 1e-16));
      },
      workers);
  return rows;
}

void write_stability_csv(std::ostream& os, std::span<const StabilityRow> rows) {
  write_header(os, "stability");
  os << "scene,lambda_gt,lambda_hat,warp_error,log10_warp_error,solved\n";
  for (const StabilityRow& r : rows) {
    os << r.scene << ',' << r.lambda_gt << ',' << r.lambda_hat << ',' << r.warp_error << ','
       << r.log10_warp << ',' << (r.solved ? 1 : 0) << '\n';
  }
}

const SensitivitySummary* SensitivityResult::find(SolverKind solver, double sigma,
                                                  const std::string& metric) const {
  for (const SensitivitySummary& s : summary) {
    if (s.solver == solver && s.sigma == sigma && s.metric == metric) return &s;
  }
  return nullptr;
}

SensitivityResult study_sensitivity(const SensitivityConfig& cfg) {
  const std::array<SolverKind, 2> solvers{SolverKind::kBest, SolverKind::kRandom};
  const std::size_t n_sigma = cfg.sigmas.size();
  // values[task][solver][metric], task = scene * n_sigma + sigma index
  std::vector<std::array<std::array<double, 4>, 2>> values(cfg.n_scenes * n_sigma);

  parallel_for(
      values.size(),
      [&](std::size_t task) {
        const std::size_t scene_idx = task / n_sigma;
        SceneConfig sc;
        sc.lambda = LambdaSpec::constant(cfg.lambda);
        sc.sigma_px = cfg.sigmas[task % n_sigma];
        sc.frames = cfg.frames;
        const std::uint64_t scene_seed = derive_seed(cfg.seed, scene_idx);
        const GroundTruthScene scene = gen_scene(sc, scene_seed);
        for (std::size_t s = 0; s < solvers.size(); ++s) {
          const std::vector<Hypothesis> hyps =
              generate_hypotheses(scene.noisy, make_solver(solvers[s]), cfg.iterations,
                                  derive_seed(scene_seed, kHypothesisStream), 1);
          double best_warp = kInf;
          double best_xfer = kInf;
          double best_lrel = kInf;
          double lambda_hat = std::numeric_limits<double>::quiet_NaN();
          for (const Hypothesis& h : hyps) {
            if (!h.model) continue;
            const RectifyModel& m = *h.model;
            best_warp = std::min(best_warp, safe_metric([&] { return warp_error(m, scene); }));
            best_xfer = std::min(best_xfer, safe_metric([&] { return transfer_error(m, scene); }));
            const double lrel = lambda_rel_error(m.lambda, scene.camera.lambda).value;
            if (std::isnan(lambda_hat) || lrel < best_lrel) {
              best_lrel = lrel;
              lambda_hat = m.lambda;
            }
          }
          values[task][s] = {best_warp, best_xfer, best_lrel, lambda_hat};
        }
      },
      cfg.workers);

  SensitivityResult out;
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    for (std::size_t k = 0; k < n_sigma; ++k) {
      for (std::size_t m = 0; m < kMetrics.size(); ++m) {
        std::vector<double> column;
        for (int scene = 0; scene < cfg.n_scenes; ++scene) {
          const double v = values[scene * n_sigma + k][s][m];
          out.rows.push_back({scene, solvers[s], cfg.sigmas[k], kMetrics[m], v});
          if (!std::isnan(v)) column.push_back(v);
        }
        out.summary.push_back({solvers[s], cfg.sigmas[k], kMetrics[m], box_stats(column)});
      }
    }
  }
  return out;
}

void write_sensitivity_long_csv(std::ostream& os, std::span<const SensitivityRow> rows) {
  write_header(os, "sensitivity");
  os << "scene_id,solver,sigma,metric,value\n";
  for (const SensitivityRow& r : rows) {
    os << r.scene << ',' << solver_name(r.solver) << ',' << shortest(r.sigma) << ',' << r.metric << ','
       << r.value << '\n';
  }
}

void write_sensitivity_summary_csv(std::ostream& os, std::span<const SensitivitySummary> rows) {
  write_header(os, "sensitivity summary");
  os << "solver,sigma,metric,n,median,q1,q3,iqr,whisker_lo,whisker_hi\n";
  for (const SensitivitySummary& r : rows) {
    const BoxStats& b = r.stats;
    os << solver_name(r.solver) << ',' << shortest(r.sigma) << ',' << r.metric << ',' << b.n << ','
       << b.median << ',' << b.q1 << ',' << b.q3 << ',' << b.iqr << ',' << b.whisker_lo << ','
       << b.whisker_hi << '\n';
  }
}

std::vector<ConvergenceRow> study_convergence(const ConvergenceConfig& cfg) {
  const std::array<SolverKind, 2> solvers{SolverKind::kBest, SolverKind::kRandom};
  // traces[scene][solver][iteration] = running-best warp error (NaN: no model)
  std::vector<std::array<std::vector<double>, 2>> traces(cfg.n_scenes);
  // The uncorrected image (identity model) is the incumbent until a
  // hypothesis beats it, so every scene contributes at every iteration.
  std::vector<double> identity(cfg.n_scenes);
  parallel_for(
      traces.size(),
      [&](std::size_t i) {
        SceneConfig sc;
        sc.lambda = LambdaSpec::constant(cfg.lambda);
        sc.sigma_px = cfg.sigma;
        sc.frames = cfg.frames;
        sc.outlier_fraction = cfg.outlier_fraction;
        const std::uint64_t scene_seed = derive_seed(cfg.seed, i);
        const GroundTruthScene scene = gen_scene(sc, scene_seed);
        identity[i] = safe_metric([&] { return warp_error(RectifyModel{}, scene); });
        RansacConfig rc;
        rc.iterations = cfg.iterations;
        rc.scoring = Scoring::kWarpOracle;
        rc.seed = derive_seed(scene_seed, kHypothesisStream);
        for (std::size_t s = 0; s < solvers.size(); ++s) {
          std::vector<double>& trace = traces[i][s];
          trace.assign(cfg.iterations, std::numeric_limits<double>::quiet_NaN());
          try {
            const RansacResult r = run_fixed(make_solver(solvers[s]), scene.noisy, rc, &scene);
            for (const TraceRow& row : r.trace) trace[row.iteration] = row.warp_error;
          } catch (const Error&) {
          }

        }
      },
      cfg.workers);

  std::vector<ConvergenceRow> rows;
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    for (int it = 0; it < cfg.iterations; ++it) {
      ConvergenceRow row;
      row.iteration = it;
      row.solver = solvers[s];
      double sum = 0.0;
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const double v = traces[i][s][it];
        if (std::isnan(v)) ++row.scenes_without_model;
        sum += std::isnan(v) ? identity[i] : std::min(v, identity[i]);
      }
      row.mean_warp_error = traces.empty() ? kInf : sum / traces.size();
      rows.push_back(row);
    }
  }
  return rows;
}

void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows) {
  write_header(os, "convergence");
  os << "iteration,solver,mean_warp_error,scenes_without_model\n";
  for (const ConvergenceRow& r : rows) {
    os << r.iteration << ',' << solver_name(r.solver) << ',' << r.mean_warp_error << ','
       << r.scenes_without_model << '\n';
  }
}

TimingReport bench_solver_time(int n_instances, std::uint64_t seed) {
  SceneConfig cfg;
  cfg.frames = 1;
  std::vector<std::array<Correspondence, 3>> inputs;
  inputs.reserve(n_instances);
  for (int i = 0; i < n_instances; ++i) {
    const GroundTruthScene scene = gen_scene(cfg, derive_seed(seed, i));
    inputs.push_back({scene.clean[0], scene.clean[1], scene.clean[2]});
  }
  const auto& selections = enumerate_selections();
  const SolverOptions opt;
  using Clock = std::chrono::steady_clock;
  auto micros = [](Clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); };

  std::vector<double> one_us;
  std::vector<double> best_us;
  one_us.reserve(n_instances);
  best_us.reserve(n_instances);
  std::array<Candidate, 4> cands;
  int count = 0;
  double sink = 0.0;
  for (int i = 0; i < n_instances; ++i) {
    const auto t0 = Clock::now();
    solve_one_into(inputs[i], selections[i % selections.size()], opt, cands, count);
    const auto t1 = Clock::now();
    one_us.push_back(micros(t1 - t0));
    if (count > 0) sink += cands[0].lambda;
  }
  for (int i = 0; i < n_instances; ++i) {
    const auto t0 = Clock::now();
    try {
      sink += solve_best(inputs[i], opt).lambda;
    } catch (const Error&) {
    }
    const auto t1 = Clock::now();
    best_us.push_back(micros(t1 - t0));
  }
  volatile double keep = sink;
  (void)keep;
  return {timing_stats(std::move(one_us)), timing_stats(std::move(best_us))};
}

void write_timing_csv(std::ostream& os, const TimingReport& report) {
  write_header(os, "timing");
  os << "operation,n,median_us,p95_us,mean_us,stddev_us\n";
  auto row = [&](const char* name, const TimingStats& s) {
    os << name << ',' << s.n << ',' << s.median_us << ',' << s.p95_us << ',' << s.mean_us << ','
       << s.stddev_us << '\n';
  };
  row("solve_one", report.solve_one);
  row("solve_best", report.solve_best);
}

}  // namespace ctrect
