#include "condcrop/json_io.hpp"

#include "condcrop/error.hpp"

namespace condcrop {
namespace {

int int_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw Error(ErrorKind::InvalidArgument, std::string("box field '") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

}  // namespace

ordered_json box_to_json(const CropBox& box) {
  return ordered_json{{"x", box.x}, {"y", box.y}, {"w", box.width}, {"h", box.height}};
}

CropBox box_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "box must be a JSON object");
  CropBox box{int_field(j, "x"), int_field(j, "y"), int_field(j, "w"), int_field(j, "h")};
  if (!box.valid()) throw Error(ErrorKind::InvalidArgument, "invalid box " + to_string(box));
  return box;
}

ordered_json breakdown_to_json(const ScoreBreakdown& b) {
  return ordered_json{{"v_aesth", b.v_aesth}, {"v_layout", b.v_layout}, {"total", b.total}};
}

AspectRatio aspect_from_json(const nlohmann::json& j) {
  if (j.is_string()) return AspectRatio::parse(j.get<std::string>());
  if (j.is_number()) return AspectRatio(j.get<double>());
  throw Error(ErrorKind::InvalidArgument, "aspect must be a \"W:H\" string or a number");
}

}  // namespace condcrop
