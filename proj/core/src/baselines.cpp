#include "condcrop/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "condcrop/error.hpp"

namespace condcrop {
namespace {

// Width and height of an omega box with the given reference side.
Dims from_height(int height, double omega) { return Dims{std::max(1, round_half_away(height * omega)), height}; }
Dims from_width(int width, double omega) { return Dims{width, std::max(1, round_half_away(width / omega))}; }

Dims largest_in_frame(const Dims& frame, double omega) {
  if (static_cast<double>(frame.width) / frame.height > omega) return from_height(frame.height, omega);
  return from_width(frame.width, omega);
}

// Keeps a rounded-up side from overflowing when the reference side is 1 px.
Dims at_least_minimal(Dims d, AspectRatio omega) {
  const Dims m = minimal_box(omega);
  if (d.width < m.width || d.height < m.height) return m;
  return d;
}

// Pixel extent in image space covered by a set of heatmap cells.
CropBox cells_to_image(const CropBox& cells, const Dims& grid, const Dims& image) {
  const double sx = static_cast<double>(image.width) / grid.width;
  const double sy = static_cast<double>(image.height) / grid.height;
  const int x0 = std::clamp(static_cast<int>(std::floor(cells.x * sx + 1e-9)), 0, image.width - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(cells.y * sy + 1e-9)), 0, image.height - 1);
  const int x1 = std::clamp(static_cast<int>(std::ceil(cells.right() * sx - 1e-9)), x0 + 1, image.width);
  const int y1 = std::clamp(static_cast<int>(std::ceil(cells.bottom() * sy - 1e-9)), y0 + 1, image.height);
  return CropBox{x0, y0, x1 - x0, y1 - y0};
}

}  // namespace

std::optional<CropBox> BinaryMask::bounding_box() const {
  int x0 = dims.width, y0 = dims.height, x1 = -1, y1 = -1;
  for (int y = 0; y < dims.height; ++y) {
    for (int x = 0; x < dims.width; ++x) {
      if (!at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return std::nullopt;
  return CropBox{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

BinaryMask threshold_mask(const Heatmap& heatmap, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be in [0, 1]");
  BinaryMask mask{heatmap.dims(), {}};
  mask.bits.reserve(heatmap.values().size());
  for (double v : heatmap.values()) mask.bits.push_back(v >= tau);
  return mask;
}

EdgeMode edge_mode_from_string(std::string_view name) {
  if (name == "short" || name == "short_edge") return EdgeMode::Short;
  if (name == "long" || name == "long_edge") return EdgeMode::Long;
  throw Error(ErrorKind::InvalidArgument, "unknown edge mode '" + std::string(name) + "'");
}

CropBox reframe_box(const CropBox& bbox, AspectRatio omega, EdgeMode mode, const Dims& image_dims) {
  const double w = omega.value();
  const bool wider = static_cast<double>(bbox.width) / bbox.height > w;
  // A relatively wide bbox is inscribed by keeping its height and circumscribed
  // by keeping its width; the reverse for a tall one.
  const bool keep_height = (mode == EdgeMode::Short) == wider;
  Dims size = keep_height ? from_height(bbox.height, w) : from_width(bbox.width, w);
  size = at_least_minimal(size, omega);
  if (size.width > image_dims.width || size.height > image_dims.height) size = largest_in_frame(image_dims, w);
  if (size.width > image_dims.width || size.height > image_dims.height) {
    throw Error(ErrorKind::InfeasibleSearchSpace, "no box of the requested ratio fits the frame");
  }

  // Center in doubled coordinates to stay in integers.
  int x = (2 * bbox.x + bbox.width - size.width);
  int y = (2 * bbox.y + bbox.height - size.height);
  x = x >= 0 ? x / 2 : -((-x + 1) / 2);
  y = y >= 0 ? y / 2 : -((-y + 1) / 2);
  x = std::clamp(x, 0, image_dims.width - size.width);
  y = std::clamp(y, 0, image_dims.height - size.height);
  return CropBox{x, y, size.width, size.height};
}

CropBox baseline_crop(const Heatmap& saliency, const LayoutConstraint& phi, AspectRatio omega, EdgeMode mode,
                      const Dims& image_dims) {
  std::optional<CropBox> bbox;
  auto merge = [&bbox](const CropBox& b) {
    if (!bbox) {
      bbox = b;
      return;
    }
    const int x0 = std::min(bbox->x, b.x);
    const int y0 = std::min(bbox->y, b.y);
    const int x1 = std::max(bbox->right(), b.right());
    const int y1 = std::max(bbox->bottom(), b.bottom());
    bbox = CropBox{x0, y0, x1 - x0, y1 - y0};
  };
  if (auto sal = threshold_mask(saliency, kSaliencyThreshold).bounding_box()) {
    merge(cells_to_image(*sal, saliency.dims(), image_dims));
  }
  for (const auto& r : phi.regions()) {
    if (r.weight > 0.0) merge(r.box);
  }
  const CropBox frame{0, 0, image_dims.width, image_dims.height};
  return reframe_box(bbox.value_or(frame), omega, mode, image_dims);
}

}  // namespace condcrop
