#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "condcrop/geometry.hpp"
#include "condcrop/image_io.hpp"
#include "condcrop/scoring.hpp"

namespace condcrop {

inline constexpr Dims kDefaultHeatmapDims{64, 64};

/// Expert crop annotations for one image.
struct AnnotationRecord {
  std::string image_id;
  Dims dims;
  std::vector<CropBox> gt_boxes;

  void validate() const;
};

/// Reads {"image_id","width","height","gt_boxes":[{x,y,w,h},…]} per line.
std::vector<AnnotationRecord> read_annotations_jsonl(std::istream& in);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);
void write_annotations_jsonl(std::ostream& out, const std::vector<AnnotationRecord>& records);

// Heatmap file formats:
//   8-bit grayscale PNG or PGM, cell value v/255;
//   text CSV whose first line is "H W" followed by H rows of W comma-separated reals.
Heatmap heatmap_from_image(const PixelImage& image);
PixelImage heatmap_to_image(const Heatmap& heatmap);
Heatmap parse_heatmap_csv(std::string_view text);
std::string format_heatmap_csv(const Heatmap& heatmap);

/// Detects PNG, PNM or CSV content.
Heatmap decode_heatmap(std::span<const std::uint8_t> bytes);
Heatmap load_heatmap(const std::filesystem::path& path);
/// Format chosen from the extension: .png, .pgm or .csv.
void save_heatmap(const std::filesystem::path& path, const Heatmap& heatmap);

/// Per-cell fraction of annotation boxes (scaled to out_dims) covering the cell.
Heatmap pseudo_heatmap(const AnnotationRecord& record, Dims out_dims = kDefaultHeatmapDims);

/// Luminance center-surround saliency: |box blur at a small radius minus box
/// blur at a large radius| on an area-resampled luminance grid, scaled so the
/// maximum is 1. Constant images give all zeros.
Heatmap heuristic_saliency(const PixelImage& image, Dims out_dims = kDefaultHeatmapDims);

/// Indicator of `planted` with uniform noise: [1-noise_amp, 1] inside and
/// [0, noise_amp] outside. Deterministic per seed.
Heatmap synth_planted(Dims dims, const CropBox& planted, double noise_amp, std::uint64_t seed);

}  // namespace condcrop
