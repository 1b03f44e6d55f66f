#include "condcrop/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "condcrop/error.hpp"

namespace condcrop {
namespace {

constexpr double kRatioEps = 1e-9;

double parse_positive(std::string_view text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v) || v <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "bad aspect ratio component '" + std::string(text) + "'");
  }
  return v;
}

bool within_rounding(int side, double ideal) {
  const double lo = std::floor(ideal + kRatioEps);
  const double hi = std::ceil(ideal - kRatioEps);
  return side >= lo && side <= hi;
}

}  // namespace

std::string to_string(const CropBox& box) {
  return "(" + std::to_string(box.x) + "," + std::to_string(box.y) + "," + std::to_string(box.width) + "," +
         std::to_string(box.height) + ")";
}

AspectRatio::AspectRatio(double omega) : omega_(omega) {
  if (!std::isfinite(omega) || omega <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "aspect ratio must be positive and finite");
  }
}

AspectRatio AspectRatio::from_fraction(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "aspect ratio sides must be positive");
  }
  return AspectRatio(width / height);
}

AspectRatio AspectRatio::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return AspectRatio(parse_positive(text));
  return from_fraction(parse_positive(text.substr(0, colon)), parse_positive(text.substr(colon + 1)));
}

bool AspectRatio::is_extreme() const { return omega_ >= 3.0 - 1e-12 || omega_ <= 1.0 / 3.0 + 1e-12; }

int round_half_away(double v) { return static_cast<int>(std::lround(v)); }

bool fits(const CropBox& box, const Dims& dims) {
  return box.valid() && box.right() <= dims.width && box.bottom() <= dims.height;
}

std::int64_t intersection_area(const CropBox& a, const CropBox& b) {
  const std::int64_t w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const std::int64_t h = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

double iou(const CropBox& a, const CropBox& b) {
  const double ix = std::min<double>(a.right(), b.right()) - std::max<double>(a.x, b.x);
  const double iy = std::min<double>(a.bottom(), b.bottom()) - std::max<double>(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = static_cast<double>(a.width) * a.height + static_cast<double>(b.width) * b.height - inter;
  return inter / uni;
}

bool contains(const CropBox& outer, const CropBox& inner) {
  return inner.x >= outer.x && inner.y >= outer.y && inner.right() <= outer.right() &&
         inner.bottom() <= outer.bottom();
}

bool satisfies_aspect(const CropBox& box, AspectRatio omega) {
  if (box.width < 1 || box.height < 1) return false;
  return within_rounding(box.width, box.height * omega.value()) ||
         within_rounding(box.height, box.width / omega.value());
}

double step_max(int position_x, int position_y, const Dims& dims, AspectRatio omega) {
  const double margin_x = dims.width - position_x;
  const double margin_y = dims.height - position_y;
  if (margin_x <= 0.0 || margin_y <= 0.0 || position_x < 0 || position_y < 0) {
    throw Error(ErrorKind::OutOfBounds, "search position outside the image");
  }
  const double w = omega.value();
  if (margin_x / margin_y <= w) return margin_x / w;
  return w * margin_y;
}

CropBox convert_step(const SearchPoint& point, const Dims& dims, AspectRatio omega) {
  const double limit = step_max(point.position_x, point.position_y, dims, omega);
  if (!(point.step > 0.0) || point.step > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::StepOutOfRange, "step " + std::to_string(point.step) + " exceeds " + std::to_string(limit));
  }
  const int margin_x = dims.width - point.position_x;
  const int margin_y = dims.height - point.position_y;
  const double w = omega.value();

  int width = 0;
  int height = 0;
  if (static_cast<double>(margin_x) / margin_y <= w) {
    height = std::min(round_half_away(point.step), margin_y);
    width = round_half_away(height * w);
    if (width > margin_x) {
      height = static_cast<int>(std::floor(margin_x / w));
      width = round_half_away(height * w);
    }
  } else {
    width = std::min(round_half_away(point.step), margin_x);
    height = round_half_away(width / w);
    if (height > margin_y) {
      width = static_cast<int>(std::floor(margin_y * w));
      height = round_half_away(width / w);
    }
  }
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::StepOutOfRange, "step " + std::to_string(point.step) + " rounds to an empty box");
  }
  return CropBox{point.position_x, point.position_y, width, height};
}

CropBox scale_box(const CropBox& box, const Dims& from, const Dims& to) {
  if (from == to) return box;
  const double sx = static_cast<double>(to.width) / from.width;
  const double sy = static_cast<double>(to.height) / from.height;
  CropBox out;
  out.x = std::clamp(round_half_away(box.x * sx), 0, to.width - 1);
  out.y = std::clamp(round_half_away(box.y * sy), 0, to.height - 1);
  out.width = std::clamp(round_half_away(box.width * sx), 1, to.width - out.x);
  out.height = std::clamp(round_half_away(box.height * sy), 1, to.height - out.y);
  return out;
}

Dims minimal_box(AspectRatio omega) {
  const double w = omega.value();
  if (w >= 1.0) return Dims{std::max(1, round_half_away(w)), 1};
  return Dims{1, std::max(1, round_half_away(1.0 / w))};
}

}  // namespace condcrop
