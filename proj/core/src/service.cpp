#include "condcrop/service.hpp"

#include <chrono>

#include "condcrop/baselines.hpp"
#include "condcrop/error.hpp"
#include "condcrop/json_io.hpp"

namespace condcrop {
namespace {

template <typename T>
T field_or(const nlohmann::json& body, const char* key, T fallback) {
  if (!body.contains(key) || body.at(key).is_null()) return fallback;
  try {
    return body.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidArgument, std::string("field '") + key + "' has the wrong type");
  }
}

Heatmap heatmap_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "heatmap must be an object");
  const Dims dims{field_or<int>(j, "width", 0), field_or<int>(j, "height", 0)};
  if (!dims.valid() || dims.area() > std::int64_t{4096} * 4096) {
    throw Error(ErrorKind::InvalidArgument, "heatmap width/height missing or out of range");
  }
  if (!j.contains("values") || !j.at("values").is_array()) throw Error(ErrorKind::InvalidArgument, "heatmap values missing");
  std::vector<double> values;
  values.reserve(j.at("values").size());
  for (const auto& v : j.at("values")) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "heatmap values must be numbers");
    values.push_back(v.get<double>());
  }
  return Heatmap(dims, std::move(values));
}

LayoutConstraint layout_from_json(const nlohmann::json& j) {
  if (j.is_null()) return {};
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "layout must be an array");
  std::vector<LayoutRegion> regions;
  for (const auto& r : j) {
    LayoutRegion region{box_from_json(r), field_or<double>(r, "weight", 1.0)};
    regions.push_back(region);
  }
  return LayoutConstraint(std::move(regions));
}

}  // namespace

std::string_view to_string(CropMethodKind m) {
  switch (m) {
    case CropMethodKind::Heatmap: return "heatmap";
    case CropMethodKind::Proposal: return "proposal";
    case CropMethodKind::BaselineShort: return "baseline_short";
    case CropMethodKind::BaselineLong: return "baseline_long";
  }
  return "heatmap";
}

CropMethodKind crop_method_from_string(std::string_view name) {
  if (name == "heatmap") return CropMethodKind::Heatmap;
  if (name == "proposal") return CropMethodKind::Proposal;
  if (name == "baseline_short") return CropMethodKind::BaselineShort;
  if (name == "baseline_long") return CropMethodKind::BaselineLong;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

HeatmapSource source_from_heatmap_bytes(std::span<const std::uint8_t> bytes) {
  return HeatmapSource{decode_heatmap(bytes), std::nullopt};
}

HeatmapSource source_from_image(const PixelImage& image) {
  return HeatmapSource{heuristic_saliency(image, kDefaultHeatmapDims), image.dims};
}

CropRequest parse_crop_request(const nlohmann::json& body, std::optional<HeatmapSource> upload) {
  if (!body.is_object()) throw Error(ErrorKind::InvalidArgument, "request body must be a JSON object");
  const int sources = (body.contains("heatmap") ? 1 : 0) + (body.contains("heatmap_csv") ? 1 : 0) + (upload ? 1 : 0);
  if (sources != 1) throw Error(ErrorKind::InvalidArgument, "exactly one heatmap source is required");

  CropRequest req;
  std::optional<Dims> source_dims;
  if (upload) {
    req.heatmap = std::move(upload->heatmap);
    source_dims = upload->image_dims;
  } else if (body.contains("heatmap")) {
    req.heatmap = heatmap_from_json(body.at("heatmap"));
  } else {
    req.heatmap = parse_heatmap_csv(field_or<std::string>(body, "heatmap_csv", ""));
  }

  req.image_dims = source_dims.value_or(req.heatmap.dims());
  if (body.contains("image")) {
    const auto& im = body.at("image");
    req.image_dims = Dims{field_or<int>(im, "width", 0), field_or<int>(im, "height", 0)};
    if (!req.image_dims.valid()) throw Error(ErrorKind::InvalidArgument, "image width/height must be positive");
  }

  if (!body.contains("aspect")) throw Error(ErrorKind::InvalidArgument, "aspect is required");
  req.omega = aspect_from_json(body.at("aspect"));
  req.layout = layout_from_json(body.value("layout", nlohmann::json()));
  if (!req.layout.fits(req.image_dims)) throw Error(ErrorKind::InvalidArgument, "layout region outside the image");

  req.method = crop_method_from_string(field_or<std::string>(body, "method", "heatmap"));
  req.optimizer.iterations = field_or<int>(body, "iterations", req.optimizer.iterations);
  req.optimizer.strategy = strategy_from_string(field_or<std::string>(body, "strategy", std::string(to_string(req.optimizer.strategy))));
  req.optimizer.step_granularity = field_or<double>(body, "step_granularity", req.optimizer.step_granularity);
  req.optimizer.seed = field_or<std::uint64_t>(body, "seed", req.optimizer.seed);
  req.optimizer.initial_samples = field_or<int>(body, "initial_samples", req.optimizer.initial_samples);
  req.optimizer.validate();
  req.k_start = field_or<int>(body, "k_start", req.k_start);
  req.k_end = field_or<int>(body, "k_end", req.k_end);
  if (req.k_start < 1 || req.k_end < req.k_start) throw Error(ErrorKind::InvalidArgument, "need 1 <= k_start <= k_end");
  req.weights.alpha = field_or<double>(body, "alpha", req.weights.alpha);
  if (!(req.weights.alpha >= 0.0) || !std::isfinite(req.weights.alpha)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must be finite and non-negative");
  }
  return req;
}

CropResponse run_crop(const CropRequest& request) {
  const Dims hd = request.heatmap.dims();
  const Heatmap heatmap = (hd.width > kMaxScoringGrid || hd.height > kMaxScoringGrid)
                              ? request.heatmap.resampled(Dims{std::min(hd.width, kMaxScoringGrid),
                                                               std::min(hd.height, kMaxScoringGrid)})
                              : request.heatmap;

  CropResponse resp;
  resp.method = request.method;
  const auto start = std::chrono::steady_clock::now();
  const HeatmapScorer scorer(heatmap, request.layout, request.weights, request.image_dims);
  switch (request.method) {
    case CropMethodKind::Heatmap: {
      auto result = optimize(scorer.as_function(), request.image_dims, request.omega, request.optimizer);
      resp.box = result.box;
      resp.evaluations = result.trace.evaluations.size();
      resp.trace = std::move(result.trace);
      break;
    }
    case CropMethodKind::Proposal: {
      const auto set = generate_proposals(request.image_dims, request.omega, request.k_start, request.k_end);
      resp.box = exhaustive_search(scorer.as_function(), set).box;
      resp.evaluations = set.boxes.size();
      break;
    }
    case CropMethodKind::BaselineShort:
    case CropMethodKind::BaselineLong: {
      const EdgeMode mode = request.method == CropMethodKind::BaselineShort ? EdgeMode::Short : EdgeMode::Long;
      resp.box = baseline_crop(heatmap, request.layout, request.omega, mode, request.image_dims);
      break;
    }
  }
  resp.breakdown = scorer(resp.box);
  resp.recall = resp.breakdown.v_layout;
  resp.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return resp;
}

nlohmann::ordered_json response_to_json(const CropResponse& response, bool include_elapsed) {
  nlohmann::ordered_json j;
  j["box"] = box_to_json(response.box);
  j["breakdown"] = breakdown_to_json(response.breakdown);
  j["recall"] = response.recall;
  j["method"] = std::string(to_string(response.method));
  j["evaluations"] = response.evaluations;
  if (include_elapsed) j["elapsed_s"] = response.elapsed_s;
  return j;
}

}  // namespace condcrop
