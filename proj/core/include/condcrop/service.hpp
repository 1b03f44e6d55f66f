#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "condcrop/geometry.hpp"
#include "condcrop/heatmaps.hpp"
#include "condcrop/optimizer.hpp"
#include "condcrop/proposals.hpp"
#include "condcrop/scoring.hpp"

namespace condcrop {

inline constexpr int kMaxScoringGrid = 256;
inline constexpr std::size_t kMaxUploadBytes = 16u << 20;

enum class CropMethodKind { Heatmap, Proposal, BaselineShort, BaselineLong };

std::string_view to_string(CropMethodKind m);
CropMethodKind crop_method_from_string(std::string_view name);

/// A heatmap supplied out of band (file on the command line or a multipart
/// upload) plus the image size it belongs to, when known.
struct HeatmapSource {
  Heatmap heatmap;
  std::optional<Dims> image_dims;
};

HeatmapSource source_from_heatmap_bytes(std::span<const std::uint8_t> bytes);
/// Raw images go through heuristic saliency; the image size is kept.
HeatmapSource source_from_image(const PixelImage& image);

struct CropRequest {
  Heatmap heatmap = Heatmap::filled(Dims{1, 1}, 0.0);
  Dims image_dims;
  AspectRatio omega{1.0};
  LayoutConstraint layout;
  CropMethodKind method = CropMethodKind::Heatmap;
  OptimizerConfig optimizer;
  int k_start = kDefaultKStart;
  int k_end = kDefaultKEnd;
  ScoreWeights weights;
};

/// Parses a JSON crop request. The heatmap comes from exactly one of the body
/// fields "heatmap" ({"width","height","values"}) and "heatmap_csv", or from
/// `upload`. Throws InvalidArgument for malformed or out-of-bounds input.
CropRequest parse_crop_request(const nlohmann::json& body, std::optional<HeatmapSource> upload = std::nullopt);

struct CropResponse {
  CropBox box;
  ScoreBreakdown breakdown;
  double recall = 0.0;
  double elapsed_s = 0.0;
  CropMethodKind method = CropMethodKind::Heatmap;
  std::size_t evaluations = 0;
  std::optional<SearchTrace> trace;
};

/// Runs the requested method. Heatmaps larger than 256x256 are area-resampled
/// down before scoring. Throws InfeasibleSearchSpace or EmptyProposalSet when
/// the constraints admit no box.
CropResponse run_crop(const CropRequest& request);

nlohmann::ordered_json response_to_json(const CropResponse& response, bool include_elapsed = true);

}  // namespace condcrop
