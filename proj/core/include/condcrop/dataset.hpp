#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "condcrop/geometry.hpp"
#include "condcrop/heatmaps.hpp"

namespace condcrop {

inline constexpr double kStripFraction = 0.15;

/// One benchmark item: an image, a layout box the ground-truth crop contains,
/// and the ground truth's own aspect ratio stored as a reduced fraction.
struct BenchmarkTuple {
  std::string image_id;
  Dims dims;
  CropBox layout;
  int omega_num = 1;
  int omega_den = 1;
  CropBox gt_box;

  AspectRatio omega() const { return AspectRatio::from_fraction(omega_num, omega_den); }

  /// Containment and exact ratio checks; returns a reason or empty.
  std::string violation() const;
};

/// Top, bottom, left and right strips (thickness 15% of the perpendicular
/// side) followed by the top-left, top-right, bottom-left and bottom-right
/// quadrants around the image center.
std::array<CropBox, 8> layout_templates(const Dims& dims);

/// Every (gt box, template) pair where the box contains the template, in
/// record, box and template order.
std::vector<BenchmarkTuple> build_benchmark(const std::vector<AnnotationRecord>& records);

void write_benchmark_jsonl(std::ostream& out, const std::vector<BenchmarkTuple>& tuples);
std::vector<BenchmarkTuple> read_benchmark_jsonl(std::istream& in);
std::vector<BenchmarkTuple> load_benchmark(const std::filesystem::path& path);

}  // namespace condcrop
