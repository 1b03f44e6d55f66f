#include "condcrop/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "condcrop/error.hpp"

namespace condcrop {
namespace {

// Row-to-row area-weight matrix for resampling one axis from n_in to n_out cells.
std::vector<std::vector<std::pair<int, double>>> axis_weights(int n_in, int n_out) {
  std::vector<std::vector<std::pair<int, double>>> out(n_out);
  const double scale = static_cast<double>(n_in) / n_out;
  for (int o = 0; o < n_out; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < n_in && i < hi; ++i) {
      const double overlap = std::min<double>(i + 1, hi) - std::max<double>(i, lo);
      if (overlap > 0.0) out[o].emplace_back(i, overlap / scale);
    }
  }
  return out;
}

void check_in_grid(const CropBox& box, const Dims& dims) {
  if (!fits(box, dims)) {
    throw Error(ErrorKind::OutOfBounds,
                "box " + to_string(box) + " outside " + std::to_string(dims.width) + "x" + std::to_string(dims.height));
  }
}

// Union pixel area of positive regions and, optionally, the weighted part of it
// inside `box`. Uses a compressed coordinate grid over all region edges.
struct UnionCover {
  double weighted_total = 0.0;
  double weighted_inside = 0.0;
  std::int64_t pixels = 0;
};

UnionCover positive_union(const std::vector<LayoutRegion>& regions, const CropBox* box) {
  std::vector<int> xs;
  std::vector<int> ys;
  for (const auto& r : regions) {
    if (r.weight <= 0.0) continue;
    xs.push_back(r.box.x);
    xs.push_back(r.box.right());
    ys.push_back(r.box.y);
    ys.push_back(r.box.bottom());
  }
  UnionCover cover;
  if (xs.empty()) return cover;
  if (box) {
    xs.push_back(box->x);
    xs.push_back(box->right());
    ys.push_back(box->y);
    ys.push_back(box->bottom());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const int cx = xs[i];
      const int cy = ys[j];
      double weight = 0.0;
      for (const auto& r : regions) {
        if (r.weight > weight && cx >= r.box.x && cx < r.box.right() && cy >= r.box.y && cy < r.box.bottom()) {
          weight = r.weight;
        }
      }
      if (weight <= 0.0) continue;
      const std::int64_t cell = std::int64_t{xs[i + 1] - xs[i]} * (ys[j + 1] - ys[j]);
      cover.pixels += cell;
      cover.weighted_total += weight * static_cast<double>(cell);
      if (box && cx >= box->x && cx < box->right() && cy >= box->y && cy < box->bottom()) {
        cover.weighted_inside += weight * static_cast<double>(cell);
      }
    }
  }
  return cover;
}

}  // namespace

Heatmap::Heatmap(Dims dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
  if (!dims_.valid()) throw Error(ErrorKind::InvalidArgument, "heatmap dims must be positive");
  if (values_.size() != static_cast<std::size_t>(dims_.area())) {
    throw Error(ErrorKind::InvalidArgument, "heatmap value count does not match dims");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidArgument, "heatmap values must lie in [0, 1]");
  }
}

Heatmap Heatmap::filled(Dims dims, double value) {
  return Heatmap(dims, std::vector<double>(static_cast<std::size_t>(dims.area()), value));
}

Heatmap Heatmap::resampled(Dims to) const {
  if (to == dims_) return *this;
  if (!to.valid()) throw Error(ErrorKind::InvalidArgument, "resample target dims must be positive");
  const auto wx = axis_weights(dims_.width, to.width);
  const auto wy = axis_weights(dims_.height, to.height);

  std::vector<double> rows(static_cast<std::size_t>(dims_.height) * to.width, 0.0);
  for (int y = 0; y < dims_.height; ++y) {
    for (int ox = 0; ox < to.width; ++ox) {
      double acc = 0.0;
      for (auto [ix, w] : wx[ox]) acc += w * at(ix, y);
      rows[static_cast<std::size_t>(y) * to.width + ox] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(to.area()), 0.0);
  for (int oy = 0; oy < to.height; ++oy) {
    for (int ox = 0; ox < to.width; ++ox) {
      double acc = 0.0;
      for (auto [iy, w] : wy[oy]) acc += w * rows[static_cast<std::size_t>(iy) * to.width + ox];
      out[static_cast<std::size_t>(oy) * to.width + ox] = std::clamp(acc, 0.0, 1.0);
    }
  }
  return Heatmap(to, std::move(out));
}

IntegralImage::IntegralImage(const Heatmap& heatmap)
    : dims_(heatmap.dims()),
      prefix_(static_cast<std::size_t>(dims_.width + 1) * (dims_.height + 1), 0.0) {
  const std::size_t stride = dims_.width + 1;
  for (int y = 0; y < dims_.height; ++y) {
    double row = 0.0;
    for (int x = 0; x < dims_.width; ++x) {
      row += heatmap.at(x, y);
      prefix_[(y + 1) * stride + (x + 1)] = prefix_[y * stride + (x + 1)] + row;
    }
  }
  total_ = prefix_.back();
}

double IntegralImage::region_sum(const CropBox& box) const {
  check_in_grid(box, dims_);
  return prefix(box.right(), box.bottom()) - prefix(box.x, box.bottom()) - prefix(box.right(), box.y) +
         prefix(box.x, box.y);
}

double v_roi(const IntegralImage& ii, const CropBox& box) { return ii.region_sum(box); }

double v_rod(const IntegralImage& ii, const CropBox& box) {
  const double inside = ii.region_sum(box);
  const double outside_cells = static_cast<double>(ii.dims().area() - box.area());
  return outside_cells - (ii.total() - inside);
}

double v_aesth_heatmap(const IntegralImage& ii, const CropBox& box) { return v_roi(ii, box) + v_rod(ii, box); }

LayoutConstraint::LayoutConstraint(std::vector<LayoutRegion> regions) : regions_(std::move(regions)) {
  for (const auto& r : regions_) {
    if (!r.box.valid()) throw Error(ErrorKind::InvalidArgument, "layout region " + to_string(r.box) + " is invalid");
    if (!std::isfinite(r.weight)) throw Error(ErrorKind::InvalidArgument, "layout weight must be finite");
  }
  area_ = positive_union(regions_, nullptr).pixels;
}

bool LayoutConstraint::fits(const Dims& dims) const {
  return std::all_of(regions_.begin(), regions_.end(), [&](const auto& r) { return condcrop::fits(r.box, dims); });
}

double v_layout(const LayoutConstraint& phi, const CropBox& box) {
  const auto& regions = phi.regions();
  double recall = 1.0;
  if (regions.size() == 1 && regions.front().weight == 1.0) {
    const auto& r = regions.front().box;
    return static_cast<double>(intersection_area(r, box)) / static_cast<double>(r.area());
  }
  const UnionCover cover = positive_union(regions, &box);
  if (cover.weighted_total > 0.0) recall = cover.weighted_inside / cover.weighted_total;
  for (const auto& r : regions) {
    if (r.weight < 0.0) {
      recall += r.weight * static_cast<double>(intersection_area(r.box, box)) / static_cast<double>(r.box.area());
    }
  }
  return recall;
}

double total_score(const ScoreWeights& weights, double v_aesth, double v_layout, std::optional<double> v_aspect) {
  if (v_aspect) return v_aesth + weights.lambda1 * *v_aspect + weights.lambda2 * v_layout;
  return v_aesth + weights.alpha * v_layout;
}

ScoreBreakdown score_crop(const IntegralImage& ii, const LayoutConstraint& phi, const ScoreWeights& weights,
                          const CropBox& box_in_image, const Dims& image_dims) {
  check_in_grid(box_in_image, image_dims);
  ScoreBreakdown out;
  out.v_aesth = v_aesth_heatmap(ii, scale_box(box_in_image, image_dims, ii.dims()));
  out.v_layout = v_layout(phi, box_in_image);
  out.total = total_score(weights, out.v_aesth, out.v_layout);
  return out;
}

HeatmapScorer::HeatmapScorer(const Heatmap& heatmap, LayoutConstraint phi, ScoreWeights weights, Dims image_dims)
    : integral_(std::make_shared<const IntegralImage>(heatmap)),
      phi_(std::move(phi)),
      weights_(weights),
      image_dims_(image_dims) {}

ScoreBreakdown HeatmapScorer::operator()(const CropBox& box) const {
  return score_crop(*integral_, phi_, weights_, box, image_dims_);
}

CandidateScorer HeatmapScorer::as_function() const {
  return [self = *this](const CropBox& box) { return self(box); };
}

}  // namespace condcrop
