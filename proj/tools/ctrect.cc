// ctrect: synthesize scenes, solve for undistortion and rectification, evaluate
// models, run the synthetic studies and warp rasters.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ctrect/bench.h"
#include "ctrect/errors.h"
#include "ctrect/image_warp.h"
#include "ctrect/metrics.h"
#include "ctrect/ransac.h"
#include "ctrect/scene.h"
#include "ctrect/scene_io.h"

using nlohmann::json;
using namespace ctrect;

namespace {

// Accepts a bare model document or the output of `solve` (its "best" entry).
RectifyModel load_model(const std::string& path) {
  const nlohmann::json doc = read_json_file(path);
  return model_from_json(doc.contains("best") ? doc.at("best") : doc);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct SynthArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::optional<double> sigma;
  std::optional<double> outliers;
  std::optional<int> frames;
  std::optional<double> lambda;
};

int cmd_synth(const SynthArgs& a) {
  SceneConfig cfg;
  if (!a.config.empty()) cfg = scene_config_from_json(read_json_file(a.config));
  if (a.sigma) cfg.sigma_px = *a.sigma;
  if (a.outliers) cfg.outlier_fraction = *a.outliers;
  if (a.frames) cfg.frames = *a.frames;
  if (a.lambda) cfg.lambda = LambdaSpec::constant(*a.lambda);
  emit(a.out, dump(scene_to_json(gen_scene(cfg, a.seed))));
  return 0;
}

struct SolveArgs {
  std::string input;
  std::string out;
  std::string solver = "best";
  std::uint64_t seed = 0;
  int iters = 25;
  double threshold_px = 2.0;
};

int cmd_solve(const SolveArgs& a) {
  const CorrespondenceSet set = correspondences_from_json(read_json_file(a.input));
  const SolverKind kind = a.solver == "random" ? SolverKind::kRandom : SolverKind::kBest;

  std::map<int, std::vector<Correspondence>> frames;
  for (const Correspondence& c : set.corrs) frames[c.frame_id].push_back(c);

  json doc = {{"format_version", kFormatVersion}};
  json candidates = json::array();
  RectifyModel best;
  if (frames.size() == 1) {
    const std::vector<Correspondence>& corrs = frames.begin()->second;
    if (kind == SolverKind::kBest) {
      best = solve_best(corrs);
      for (const RectifyModel& m : solve_all(corrs)) candidates.push_back(model_to_json(m));
    } else {
      std::mt19937_64 rng(a.seed);
      best = solve_random(corrs, rng);
      candidates.push_back(model_to_json(best));
    }
  } else {
    RansacConfig rc;
    rc.iterations = a.iters;
    rc.scoring = Scoring::kConsensus;
    rc.inlier_threshold = a.threshold_px * set.image.norm_scale;
    rc.seed = a.seed;
    const MinimalSolver solver = make_solver(kind);
    const RansacResult r = run_fixed(solver, set.corrs, rc);
    best = r.model;
    doc["inliers"] = r.inliers;
    for (const Hypothesis& h : generate_hypotheses(set.corrs, solver, rc.iterations, rc.seed)) {
      if (!h.model) continue;
      json m = model_to_json(*h.model);
      m["iteration"] = h.iteration;
      m["frame_id"] = h.frame_id;
      candidates.push_back(m);
    }
  }
  doc["best"] = model_to_json(best);
  doc["candidates"] = candidates;
  emit(a.out, dump(doc));
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string gt;
  std::string out;
  std::string format = "json";
};

int cmd_eval(const EvalArgs& a) {
  const RectifyModel model = load_model(a.model);
  const CorrespondenceSet set = correspondences_from_json(read_json_file(a.gt));
  if (!set.ground_truth) {
    throw Error(ErrorCode::kSchemaViolation, a.gt + " has no ground_truth block");
  }
  const GroundTruthScene& gt = *set.ground_truth;
  const double warp = warp_error(model, gt);
  std::optional<double> xfer;
  if (model.primary_vp() != nullptr) xfer = transfer_error(model, gt);
  const LambdaError lerr = lambda_rel_error(model.lambda, gt.camera.lambda);
  std::vector<Correspondence> inliers;
  for (std::size_t i = 0; i < set.corrs.size(); ++i) {
    if (!gt.outlier[i]) inliers.push_back(set.corrs[i]);
  }
  std::optional<double> symm;
  if (model.primary_vp() != nullptr) symm = symm_transfer_error(model, inliers);

  if (a.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "# ctrect eval, format_version 1\nmetric,value\n";
    os << "warp_error_px," << warp << '\n';
    if (xfer) os << "transfer_error_px," << *xfer << '\n';
    os << (lerr.absolute ? "lambda_abs_error," : "lambda_rel_error,") << lerr.value << '\n';
    if (symm) os << "symm_transfer_error," << *symm << '\n';
    emit(a.out, os.str());
  } else {
    json doc = {{"format_version", kFormatVersion},
                {"warp_error_px", number_or_null(warp)},
                {"transfer_error_px", xfer ? number_or_null(*xfer) : json(nullptr)},
                {"lambda_error", lerr.value},
                {"lambda_error_absolute", lerr.absolute},
                {"symm_transfer_error", symm ? number_or_null(*symm) : json(nullptr)}};
    emit(a.out, dump(doc));
  }
  return std::isfinite(warp) ? 0 : 1;
}

struct BenchArgs {
  std::string study;
  std::string out;
  std::string summary;
  std::string format = "csv";
  std::uint64_t seed = 0;
  int scenes = 0;
  std::vector<double> sigmas;
  int iters = 25;
  double outliers = 0.5;
};

json box_json(const BoxStats& b) {
  return {{"n", b.n},
          {"median", number_or_null(b.median)},
          {"q1", number_or_null(b.q1)},
          {"q3", number_or_null(b.q3)},
          {"iqr", number_or_null(b.iqr)},
          {"whisker_lo", number_or_null(b.whisker_lo)},
          {"whisker_hi", number_or_null(b.whisker_hi)}};
}

int cmd_bench(const BenchArgs& a) {
  std::ostringstream os;
  json doc = {{"format_version", kFormatVersion}, {"study", a.study}};
  const bool csv = a.format == "csv";
  if (a.study == "stability") {
    const auto rows = study_stability(a.scenes > 0 ? a.scenes : 500, a.seed);
    if (csv) {
      write_stability_csv(os, rows);
    } else {
      std::vector<double> logs;
      for (const StabilityRow& r : rows) logs.push_back(r.log10_warp);
      doc["log10_warp_error"] = box_json(box_stats(logs));
    }
  } else if (a.study == "sensitivity") {
    SensitivityConfig cfg;
    if (a.scenes > 0) cfg.n_scenes = a.scenes;
    if (!a.sigmas.empty()) cfg.sigmas = a.sigmas;
    cfg.iterations = a.iters;
    cfg.seed = a.seed;
    const SensitivityResult r = study_sensitivity(cfg);
    if (csv) {
      write_sensitivity_long_csv(os, r.rows);
      if (!a.summary.empty()) {
        std::ostringstream ss;
        write_sensitivity_summary_csv(ss, r.summary);
        write_text_file(a.summary, ss.str());
      }
    } else {
      json rows = json::array();
      for (const SensitivitySummary& s : r.summary) {
        rows.push_back({{"solver", solver_name(s.solver)},
                        {"sigma", s.sigma},
                        {"metric", s.metric},
                        {"stats", box_json(s.stats)}});
      }
      doc["summary"] = rows;
    }
  } else if (a.study == "convergence") {
    ConvergenceConfig cfg;
    if (a.scenes > 0) cfg.n_scenes = a.scenes;
    if (!a.sigmas.empty()) cfg.sigma = a.sigmas.front();
    cfg.iterations = a.iters;
    cfg.outlier_fraction = a.outliers;
    cfg.seed = a.seed;
    const auto rows = study_convergence(cfg);
    if (csv) {
      write_convergence_csv(os, rows);
    } else {
      json out = json::array();
      for (const ConvergenceRow& r : rows) {
        out.push_back({{"iteration", r.iteration},
                       {"solver", solver_name(r.solver)},
                       {"mean_warp_error", number_or_null(r.mean_warp_error)},
                       {"scenes_without_model", r.scenes_without_model}});
      }
      doc["rows"] = out;
    }
  } else if (a.study == "timing") {
    const TimingReport r = bench_solver_time(a.scenes > 0 ? a.scenes : 10000, a.seed);
    if (csv) {
      write_timing_csv(os, r);
    } else {
      auto stats = [](const TimingStats& s) {
        return json{{"n", s.n}, {"median_us", s.median_us}, {"p95_us", s.p95_us},
                    {"mean_us", s.mean_us}, {"stddev_us", s.stddev_us}};
      };
      doc["solve_one"] = stats(r.solve_one);
      doc["solve_best"] = stats(r.solve_best);
    }
  }
  emit(a.out, csv ? os.str() : dump(doc));
  return 0;
}

struct WarpArgs {
  std::string image;
  std::string model;
  std::string out;
  std::string mode = "rectify";
  int max_size = 4096;
};

int cmd_warp(const WarpArgs& a) {
  const Image src = read_ppm(a.image);
  const RectifyModel model = load_model(a.model);
  WarpOptions opt;
  opt.max_size = a.max_size;
  const Image dst =
      warp_image(src, model, a.mode == "undistort" ? WarpMode::kUndistort : WarpMode::kRectify, opt);
  write_ppm(a.out, dst);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint radial undistortion and affine rectification from conjugate translations"};
  app.require_subcommand(1);
  bool error_json = false;
  app.add_flag("--error-json", error_json, "Print failures as a JSON error record on stderr");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic scene with ground truth");
  s->add_option("--config", synth.config, "Scene configuration JSON")->check(CLI::ExistingFile);
  s->add_option("-o,--out", synth.out, "Output correspondence JSON (default stdout)");
  s->add_option("--seed", synth.seed, "Scene seed");
  s->add_option("--sigma", synth.sigma, "Pixel noise standard deviation")->check(CLI::NonNegativeNumber);
  s->add_option("--outliers", synth.outliers, "Fraction of mismatched frames")->check(CLI::Range(0.0, 0.99));
  s->add_option("--frames", synth.frames, "Number of frames")->check(CLI::PositiveNumber);
  s->add_option("--lambda", synth.lambda, "Division model parameter");

  SolveArgs solve;
  auto* so = app.add_subcommand("solve", "Estimate the vanishing line and lens distortion");
  so->add_option("correspondences", solve.input, "Correspondence JSON")->required()->check(CLI::ExistingFile);
  so->add_option("-o,--out", solve.out, "Output JSON (default stdout)");
  so->add_option("--solver", solve.solver, "Minimal solution selection")
      ->check(CLI::IsMember({"best", "random"}));
  so->add_option("--seed", solve.seed, "RANSAC seed");
  so->add_option("--iters", solve.iters, "RANSAC iterations for multi-frame input")
      ->check(CLI::PositiveNumber);
  so->add_option("--threshold", solve.threshold_px, "Inlier threshold in pixels")
      ->check(CLI::PositiveNumber);

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Score a model against a ground-truth scene");
  ev->add_option("model", eval.model, "Model JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("scene", eval.gt, "Correspondence JSON with ground truth")->required()->check(CLI::ExistingFile);
  ev->add_option("-o,--out", eval.out, "Output (default stdout)");
  ev->add_option("--format", eval.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a synthetic study");
  b->add_option("study", bench.study, "Study")
      ->required()
      ->check(CLI::IsMember({"stability", "sensitivity", "convergence", "timing"}));
  b->add_option("-o,--out", bench.out, "Output (default stdout)");
  b->add_option("--summary", bench.summary, "Sensitivity boxplot summary CSV");
  b->add_option("--format", bench.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  b->add_option("--seed", bench.seed, "Master seed");
  b->add_option("--scenes", bench.scenes, "Number of scenes or timed instances")->check(CLI::PositiveNumber);
  b->add_option("--sigma", bench.sigmas, "Noise level(s) in pixels")->delimiter(',');
  b->add_option("--iters", bench.iters, "RANSAC iterations")->check(CLI::PositiveNumber);
  b->add_option("--outliers", bench.outliers, "Outlier fraction (convergence)")->check(CLI::Range(0.0, 0.99));

  WarpArgs warp;
  auto* w = app.add_subcommand("warp", "Undistort or rectify a PPM raster");
  w->add_option("image", warp.image, "Input PPM (P6)")->required()->check(CLI::ExistingFile);
  w->add_option("model", warp.model, "Model JSON")->required()->check(CLI::ExistingFile);
  w->add_option("-o,--out", warp.out, "Output PPM")->required();
  w->add_option("--mode", warp.mode, "Warp mode")->check(CLI::IsMember({"undistort", "rectify"}));
  w->add_option("--max-size", warp.max_size, "Largest output side")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return cmd_synth(synth);
    if (so->parsed()) return cmd_solve(solve);
    if (ev->parsed()) return cmd_eval(eval);
    if (b->parsed()) return cmd_bench(bench);
    if (w->parsed()) return cmd_warp(warp);
  } catch (const Error& e) {
    if (error_json) {
      std::cerr << error_to_json(e).dump() << '\n';
    } else {
      std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    }
    return 1;
  } catch (const std::exception& e) {
    if (error_json) {
      std::cerr << json{{"format_version", kFormatVersion},
                        {"error", {{"code", "Internal"}, {"message", e.what()}}}}
                       .dump()
                << '\n';
    } else {
      std::cerr << "error: " << e.what() << '\n';
    }
    return 2;
  }
  return 0;
}
