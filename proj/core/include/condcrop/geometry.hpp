#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace condcrop {

struct Dims {
  int width = 1;
  int height = 1;

  std::int64_t area() const { return std::int64_t{width} * height; }
  bool valid() const { return width >= 1 && height >= 1; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// Axis-aligned crop rectangle. Top-left origin, x right, y down, covering the
// half-open pixel ranges [x, x + width) and [y, y + height).
struct CropBox {
  int x = 0;
  int y = 0;
  int width = 1;
  int height = 1;

  int right() const { return x + width; }
  int bottom() const { return y + height; }
  std::int64_t area() const { return std::int64_t{width} * height; }
  bool valid() const { return x >= 0 && y >= 0 && width >= 1 && height >= 1; }
  friend bool operator==(const CropBox&, const CropBox&) = default;
};

std::string to_string(const CropBox& box);

/// Width divided by height. Always positive and finite.
class AspectRatio {
 public:
  explicit AspectRatio(double omega);

  static AspectRatio from_fraction(double width, double height);

  /// Accepts "W:H" (e.g. "16:9") or a positive decimal ("1.5").
  static AspectRatio parse(std::string_view text);

  double value() const { return omega_; }

  /// Extreme ratios (>= 3:1 either way) get doubled proposal offsets.
  bool is_extreme() const;

 private:
  double omega_;
};

/// The optimizer's search coordinates: top-left corner plus the free side length.
struct SearchPoint {
  int position_x = 0;
  int position_y = 0;
  double step = 1.0;
  friend bool operator==(const SearchPoint&, const SearchPoint&) = default;
};

/// Half-away-from-zero rounding to int.
int round_half_away(double v);

bool fits(const CropBox& box, const Dims& dims);

/// Intersection over union using real-valued rectangle areas.
double iou(const CropBox& a, const CropBox& b);

/// True iff every pixel of `inner` lies inside `outer`.
bool contains(const CropBox& outer, const CropBox& inner);

std::int64_t intersection_area(const CropBox& a, const CropBox& b);

/// A box satisfies omega when its width lies between floor and ceil of
/// height*omega, or its height lies between floor and ceil of width/omega.
bool satisfies_aspect(const CropBox& box, AspectRatio omega);

/// Largest step at (position_x, position_y) that keeps convert_step in bounds.
double step_max(int position_x, int position_y, const Dims& dims, AspectRatio omega);

/// Maps (position, step) to a pixel box of ratio omega. The free side is the
/// height when the remaining margin is relatively narrower than omega, and the
/// width otherwise. Throws StepOutOfRange when step exceeds step_max or a side
/// rounds to zero.
CropBox convert_step(const SearchPoint& point, const Dims& dims, AspectRatio omega);

/// Scales a box between two pixel grids, rounding half away from zero and
/// clamping to the target grid with sides of at least one pixel.
CropBox scale_box(const CropBox& box, const Dims& from, const Dims& to);

/// Smallest box of ratio omega that satisfies_aspect with both sides >= 1.
Dims minimal_box(AspectRatio omega);

}  // namespace condcrop
