#include "ctrect/scene_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ctrect {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, what);
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return obj.at(key);
}

double number(const json& v, const char* what) {
  if (!v.is_number()) schema_error(std::string("'") + what + "' must be a number");
  return v.get<double>();
}

Vec2 vec2(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 2) schema_error(std::string("'") + what + "' must be [x, y]");
  return Vec2(number(v[0], what), number(v[1], what));
}

Vec3 vec3(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 3) schema_error(std::string("'") + what + "' must have 3 numbers");
  return Vec3(number(v[0], what), number(v[1], what), number(v[2], what));
}

void check_version(const json& doc) {
  const json& v = field(doc, "format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    schema_error("unsupported format_version");
  }
}

json image_json(const ImageFrame& image) {
  return {{"width", image.width},
          {"height", image.height},
          {"center", {image.center.x(), image.center.y()}}};
}

}  // namespace

json correspondences_to_json(const ImageFrame& image, const std::vector<Correspondence>& corrs) {
  json records = json::array();
  for (const Correspondence& c : corrs) {
    const Vec2 a = denormalize_from_frame(c.pd, image);
    const Vec2 b = denormalize_from_frame(c.pd_prime, image);
    records.push_back({{"frame_id", c.frame_id},
                       {"direction_id", c.direction_id},
                       {"points", {{a.x(), a.y()}, {b.x(), b.y()}}},
                       {"scale_class", c.scale_class == ScaleClass::kUnit ? "unit" : "unknown"}});
  }
  return {{"format_version", kFormatVersion},
          {"image", image_json(image)},
          {"normalization", "sum_wh"},
          {"records", records}};
}

json scene_to_json(const GroundTruthScene& scene) {
  json doc = correspondences_to_json(scene.image, scene.noisy);
  json P = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) P.push_back(scene.camera.P(r, c));
  }
  json translations = json::array();
  for (const Vec2& t : scene.translations) translations.push_back({t.x(), t.y()});
  doc["ground_truth"] = {{"P", P},
                         {"lambda", scene.camera.lambda},
                         {"translations", translations},
                         {"plane_extent", scene.config.plane_extent},
                         {"l", {scene.l_gt.h.x(), scene.l_gt.h.y(), scene.l_gt.h.z()}},
                         {"outlier", scene.outlier},
                         {"sigma_px", scene.config.sigma_px},
                         {"seed", scene.seed}};
  return doc;
}

CorrespondenceSet correspondences_from_json(const json& doc) {
  check_version(doc);
  CorrespondenceSet out;
  const json& img = field(doc, "image");
  const json& w = field(img, "width");
  const json& h = field(img, "height");
  if (!w.is_number_integer() || !h.is_number_integer() || w.get<int>() <= 0 || h.get<int>() <= 0) {
    schema_error("image width and height must be positive integers");
  }
  std::optional<Vec2> center;
  if (img.contains("center")) center = vec2(img.at("center"), "center");
  out.image = ImageFrame::make(w.get<int>(), h.get<int>(), center);
  if (doc.contains("normalization") && doc.at("normalization") != "sum_wh") {
    schema_error("only the sum_wh normalization is supported");
  }

  const json& records = field(doc, "records");
  if (!records.is_array()) schema_error("'records' must be an array");
  for (const json& r : records) {
    Correspondence c;
    const json& fid = field(r, "frame_id");
    if (!fid.is_number_integer()) schema_error("'frame_id' must be an integer");
    c.frame_id = fid.get<int>();
    if (r.contains("direction_id")) {
      if (!r.at("direction_id").is_number_integer()) schema_error("'direction_id' must be an integer");
      c.direction_id = r.at("direction_id").get<int>();
    }
    const json& pts = field(r, "points");
    if (!pts.is_array() || pts.size() != 2) schema_error("'points' must hold two points");
    c.pd = normalize_to_frame(vec2(pts[0], "points"), out.image);
    c.pd_prime = normalize_to_frame(vec2(pts[1], "points"), out.image);
    if (r.contains("scale_class")) {
      const json& sc = r.at("scale_class");
      if (sc == "unit") {
        c.scale_class = ScaleClass::kUnit;
      } else if (sc == "unknown") {
        c.scale_class = ScaleClass::kUnknown;
      } else {
        schema_error("'scale_class' must be 'unit' or 'unknown'");
      }
    }
    out.corrs.push_back(c);
  }

  if (doc.contains("ground_truth")) {
    const json& g = doc.at("ground_truth");
    GroundTruthScene gt;
    gt.image = out.image;
    gt.config.width = out.image.width;
    gt.config.height = out.image.height;
    const json& P = field(g, "P");
    if (!P.is_array() || P.size() != 9) schema_error("'P' must hold 9 numbers");
    for (int k = 0; k < 9; ++k) gt.camera.P(k / 3, k % 3) = number(P[k], "P");
    gt.camera.lambda = number(field(g, "lambda"), "lambda");
    gt.config.lambda = LambdaSpec::constant(gt.camera.lambda);
    const json& ts = field(g, "translations");
    if (!ts.is_array() || ts.empty()) schema_error("'translations' must be a non-empty array");
    for (const json& t : ts) gt.translations.push_back(vec2(t, "translations"));
    gt.config.directions = static_cast<int>(gt.translations.size());
    if (g.contains("plane_extent")) gt.config.plane_extent = number(g.at("plane_extent"), "plane_extent");
    if (g.contains("sigma_px")) gt.config.sigma_px = number(g.at("sigma_px"), "sigma_px");
    if (g.contains("seed") && g.at("seed").is_number_unsigned()) gt.seed = g.at("seed").get<std::uint64_t>();
    gt.l_gt = gt_vanishing_line(gt.camera.P);
    gt.noisy = out.corrs;
    if (g.contains("outlier")) {
      const json& mask = g.at("outlier");
      if (!mask.is_array() || mask.size() != out.corrs.size()) {
        schema_error("'outlier' must hold one flag per record");
      }
      for (const json& m : mask) {
        if (!m.is_boolean()) schema_error("'outlier' flags must be booleans");
        gt.outlier.push_back(m.get<bool>());
      }
    } else {
      gt.outlier.assign(out.corrs.size(), false);
    }
    out.ground_truth = std::move(gt);
  }
  return out;
}

json model_to_json(const RectifyModel& model) {
  json doc = {{"format_version", kFormatVersion},
              {"l", {model.l.h.x(), model.l.h.y(), model.l.h.z()}},
              {"lambda", model.lambda}};
  if (const PointH* u = model.primary_vp()) {
    doc["u"] = {u->h.x(), u->h.y(), u->h.z()};
    doc["direction_id"] = model.vps.front().direction_id;
  }
  if (model.vps.size() > 1) {
    json vps = json::array();
    for (const DirectionVp& d : model.vps) {
      vps.push_back({{"direction_id", d.direction_id}, {"u", {d.u.h.x(), d.u.h.y(), d.u.h.z()}}});
    }
    doc["vanishing_points"] = vps;
  }
  if (std::isfinite(model.score)) doc["score"] = model.score;
  if (!model.provenance.empty()) doc["provenance"] = model.provenance;
  return doc;
}

RectifyModel model_from_json(const json& doc) {
  check_version(doc);
  RectifyModel m;
  const Vec3 l = vec3(field(doc, "l"), "l");
  if (std::abs(l.z() - 1.0) > 1e-12) schema_error("'l' must have l3 = 1");
  m.l = LineH(l);
  m.lambda = number(field(doc, "lambda"), "lambda");
  if (doc.contains("vanishing_points")) {
    for (const json& d : doc.at("vanishing_points")) {
      const json& id = field(d, "direction_id");
      if (!id.is_number_integer()) schema_error("'direction_id' must be an integer");
      m.vps.push_back({id.get<int>(), PointH(vec3(field(d, "u"), "u"))});
    }
  } else if (doc.contains("u")) {
    int dir = 0;
    if (doc.contains("direction_id")) {
      if (!doc.at("direction_id").is_number_integer()) schema_error("'direction_id' must be an integer");
      dir = doc.at("direction_id").get<int>();
    }
    m.vps.push_back({dir, PointH(vec3(doc.at("u"), "u"))});
  }
  if (doc.contains("score")) m.score = number(doc.at("score"), "score");
  if (doc.contains("provenance")) {
    if (!doc.at("provenance").is_string()) schema_error("'provenance' must be a string");
    m.provenance = doc.at("provenance").get<std::string>();
  }
  return m;
}

SceneConfig scene_config_from_json(const json& doc, SceneConfig cfg) {
  if (!doc.is_object()) schema_error("scene config must be an object");
  auto get_int = [&](const char* key, int& dst) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_number_integer()) schema_error(std::string("'") + key + "' must be an integer");
    dst = doc.at(key).get<int>();
  };
  auto get_num = [&](const char* key, double& dst) {
    if (doc.contains(key)) dst = number(doc.at(key), key);
  };
  get_int("width", cfg.width);
  get_int("height", cfg.height);
  get_num("focal_min_mm", cfg.focal_min_mm);
  get_num("focal_max_mm", cfg.focal_max_mm);
  get_num("sigma_px", cfg.sigma_px);
  get_int("frames", cfg.frames);
  get_int("directions", cfg.directions);
  get_num("outlier_fraction", cfg.outlier_fraction);
  get_num("plane_extent", cfg.plane_extent);
  get_num("min_coverage", cfg.min_coverage);
  get_num("max_tilt_deg", cfg.max_tilt_deg);
  if (doc.contains("lambda")) {
    const json& l = doc.at("lambda");
    if (l.is_number()) {
      cfg.lambda = LambdaSpec::constant(l.get<double>());
    } else if (l.is_array() && l.size() == 2) {
      cfg.lambda = LambdaSpec::uniform(number(l[0], "lambda"), number(l[1], "lambda"));
    } else {
      schema_error("'lambda' must be a number or a [lo, hi] interval");
    }
  }
  cfg.validate();
  return cfg;
}

json error_to_json(const Error& e) {
  return {{"format_version", kFormatVersion},
          {"error", {{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}}}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaViolation, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

}  // namespace ctrect
