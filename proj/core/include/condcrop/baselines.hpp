#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "condcrop/geometry.hpp"
#include "condcrop/scoring.hpp"

namespace condcrop {

inline constexpr double kSaliencyThreshold = 0.01;

struct BinaryMask {
  Dims dims;
  std::vector<bool> bits;

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * dims.width + x]; }

  /// Tight bounding box of the set bits, if any.
  std::optional<CropBox> bounding_box() const;
};

BinaryMask threshold_mask(const Heatmap& heatmap, double tau);

enum class EdgeMode { Short, Long };

EdgeMode edge_mode_from_string(std::string_view name);

/// Re-frames the bounding box of (thresholded saliency ∪ positive layout
/// regions) to ratio omega. Short keeps the side that yields the largest
/// omega box inside the bbox; Long keeps the side that yields the smallest
/// omega box around it. The result is centered on the bbox, shrunk to the
/// frame if needed, and shifted into bounds.
CropBox baseline_crop(const Heatmap& saliency, const LayoutConstraint& phi, AspectRatio omega, EdgeMode mode,
                      const Dims& image_dims);

/// Core of baseline_crop for an already-known mask bounding box.
CropBox reframe_box(const CropBox& bbox, AspectRatio omega, EdgeMode mode, const Dims& image_dims);

}  // namespace condcrop
