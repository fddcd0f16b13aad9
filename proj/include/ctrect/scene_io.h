#pragma once

// JSON documents exchanged by the command-line tool. Every document carries
// "format_version": 1. Point coordinates in files are pixels; the camera
// matrix P of the ground-truth block maps scene-plane coordinates to
// normalized image coordinates.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "ctrect/errors.h"
#include "ctrect/evl_solver.h"
#include "ctrect/scene.h"

namespace ctrect {

inline constexpr int kFormatVersion = 1;

struct CorrespondenceSet {
  ImageFrame image;
  std::vector<Correspondence> corrs;
  // Present when the file embeds a ground-truth block; frames are not stored,
  // so only the camera, translations, extent and outlier mask are restored.
  std::optional<GroundTruthScene> ground_truth;
};

nlohmann::json scene_to_json(const GroundTruthScene& scene);
nlohmann::json correspondences_to_json(const ImageFrame& image,
                                       const std::vector<Correspondence>& corrs);
// Throws Error(kSchemaViolation).
CorrespondenceSet correspondences_from_json(const nlohmann::json& doc);

nlohmann::json model_to_json(const RectifyModel& model);
RectifyModel model_from_json(const nlohmann::json& doc);

SceneConfig scene_config_from_json(const nlohmann::json& doc, SceneConfig base = {});

nlohmann::json error_to_json(const Error& e);

// Throws Error(kIo) / Error(kSchemaViolation) for unreadable or malformed files.
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ctrect
