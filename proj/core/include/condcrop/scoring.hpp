#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "condcrop/geometry.hpp"

namespace condcrop {

/// Aesthetic field over a grid, row-major, every value in [0, 1].
class Heatmap {
 public:
  Heatmap(Dims dims, std::vector<double> values);

  static Heatmap filled(Dims dims, double value);

  const Dims& dims() const { return dims_; }
  std::span<const double> values() const { return values_; }
  double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * dims_.width + x]; }

  /// Area-averaged resample onto a new grid.
  Heatmap resampled(Dims to) const;

 private:
  Dims dims_;
  std::vector<double> values_;
};

/// Summed-area table with one row and column of zero padding.
class IntegralImage {
 public:
  explicit IntegralImage(const Heatmap& heatmap);

  const Dims& dims() const { return dims_; }
  double total() const { return total_; }
  double prefix(int x, int y) const { return prefix_[static_cast<std::size_t>(y) * (dims_.width + 1) + x]; }

  /// Sum of heatmap cells inside `box`; throws OutOfBounds if it leaves the grid.
  double region_sum(const CropBox& box) const;

 private:
  Dims dims_;
  std::vector<double> prefix_;
  double total_ = 0.0;
};

inline IntegralImage build_integral(const Heatmap& heatmap) { return IntegralImage(heatmap); }

double v_roi(const IntegralImage& ii, const CropBox& box);
double v_rod(const IntegralImage& ii, const CropBox& box);
double v_aesth_heatmap(const IntegralImage& ii, const CropBox& box);

/// A layout region with a signed weight. Positive regions must be covered by
/// the crop; negative regions penalize coverage.
struct LayoutRegion {
  CropBox box;
  double weight = 1.0;
  friend bool operator==(const LayoutRegion&, const LayoutRegion&) = default;
};

class LayoutConstraint {
 public:
  LayoutConstraint() = default;
  explicit LayoutConstraint(std::vector<LayoutRegion> regions);
  static LayoutConstraint single(const CropBox& box) { return LayoutConstraint({LayoutRegion{box, 1.0}}); }

  const std::vector<LayoutRegion>& regions() const { return regions_; }
  bool empty() const { return regions_.empty(); }

  /// Pixel count of the union of positive-weight regions.
  std::int64_t area() const { return area_; }

  bool fits(const Dims& dims) const;

 private:
  std::vector<LayoutRegion> regions_;
  std::int64_t area_ = 0;
};

/// Layout recall of `box`: weighted fraction of the positive-region union
/// inside the box, minus weighted coverage of each negative region. With only
/// unit-weight positive regions this is |box ∩ union| / |union|. An empty
/// positive set counts as fully recalled.
double v_layout(const LayoutConstraint& phi, const CropBox& box);

struct ScoreWeights {
  double alpha = 1e4;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Hard-aspect mode: v_aesth + alpha * v_layout. When a soft aspect term is
/// supplied the general form v_aesth + lambda1 * v_aspect + lambda2 * v_layout
/// is used instead.
double total_score(const ScoreWeights& weights, double v_aesth, double v_layout,
                   std::optional<double> v_aspect = std::nullopt);

struct ScoreBreakdown {
  double v_aesth = 0.0;
  double v_layout = 0.0;
  double total = 0.0;
  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

/// Aesthetics in heatmap space (box scaled from image_dims), layout in image space.
ScoreBreakdown score_crop(const IntegralImage& ii, const LayoutConstraint& phi, const ScoreWeights& weights,
                          const CropBox& box_in_image, const Dims& image_dims);

/// Candidate-scoring contract shared by both search strategies.
using CandidateScorer = std::function<ScoreBreakdown(const CropBox&)>;

/// Binds a heatmap, layout and weights into a thread-safe CandidateScorer.
class HeatmapScorer {
 public:
  HeatmapScorer(const Heatmap& heatmap, LayoutConstraint phi, ScoreWeights weights, Dims image_dims);

  ScoreBreakdown operator()(const CropBox& box) const;
  CandidateScorer as_function() const;

  const IntegralImage& integral() const { return *integral_; }

 private:
  std::shared_ptr<const IntegralImage> integral_;
  LayoutConstraint phi_;
  ScoreWeights weights_;
  Dims image_dims_;
};

}  // namespace condcrop
