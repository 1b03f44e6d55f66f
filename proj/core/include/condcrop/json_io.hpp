#pragma once

#include <nlohmann/json.hpp>

#include "condcrop/geometry.hpp"
#include "condcrop/scoring.hpp"

namespace condcrop {

using ordered_json = nlohmann::ordered_json;

/// {"x":int,"y":int,"w":int,"h":int}
ordered_json box_to_json(const CropBox& box);
CropBox box_from_json(const nlohmann::json& j);

/// {"v_aesth":…,"v_layout":…,"total":…}
ordered_json breakdown_to_json(const ScoreBreakdown& b);

/// Accepts "W:H" strings or positive numbers.
AspectRatio aspect_from_json(const nlohmann::json& j);

}  // namespace condcrop
