#include <gtest/gtest.h>

#include "condcrop/baselines.hpp"
#include "condcrop/error.hpp"
#include "condcrop/random.hpp"

namespace condcrop {
namespace {

TEST(ThresholdMask, Cases) {
  const auto zeros = threshold_mask(Heatmap::filled({4, 3}, 0.0), 0.01);
  EXPECT_FALSE(zeros.bounding_box().has_value());
  const auto ones = threshold_mask(Heatmap::filled({4, 3}, 1.0), 0.01);
  EXPECT_EQ(ones.bounding_box(), (CropBox{0, 0, 4, 3}));
  const auto m = threshold_mask(Heatmap({2, 2}, {0.5, 0.25, 0.0, 1.0}), 0.5);
  EXPECT_EQ(m.bits, (std::vector<bool>{true, false, false, true}));
  EXPECT_THROW(threshold_mask(Heatmap::filled({1, 1}, 0.0), 1.5), Error);
}

TEST(Reframe, HandTraces) {
  for (EdgeMode mode : {EdgeMode::Short, EdgeMode::Long}) {
    EXPECT_EQ(reframe_box({20, 20, 60, 60}, AspectRatio(1.0), mode, {200, 200}), (CropBox{20, 20, 60, 60}));
  }
  EXPECT_EQ(reframe_box({0, 0, 40, 80}, AspectRatio(1.0), EdgeMode::Short, {200, 200}), (CropBox{0, 20, 40, 40}));
  EXPECT_EQ(reframe_box({0, 0, 40, 80}, AspectRatio(1.0), EdgeMode::Long, {200, 200}), (CropBox{0, 0, 80, 80}));
}

TEST(Reframe, ShrinksToFrame) {
  const CropBox b = reframe_box({0, 40, 200, 20}, AspectRatio(1.0), EdgeMode::Long, {200, 100});
  EXPECT_EQ(b, (CropBox{50, 0, 100, 100}));
}

TEST(Reframe, RandomizedInvariants) {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const Dims d{rng.uniform_int(10, 300), rng.uniform_int(10, 300)};
    const int w = rng.uniform_int(1, d.width);
    const int h = rng.uniform_int(1, d.height);
    const CropBox bbox{rng.uniform_int(0, d.width - w), rng.uniform_int(0, d.height - h), w, h};
    const AspectRatio omega(std::exp((rng.unit() - 0.5) * 2.0));
    const CropBox s = reframe_box(bbox, omega, EdgeMode::Short, d);
    const CropBox l = reframe_box(bbox, omega, EdgeMode::Long, d);
    ASSERT_TRUE(fits(s, d));
    ASSERT_TRUE(fits(l, d));
    ASSERT_TRUE(satisfies_aspect(s, omega)) << to_string(s);
    ASSERT_TRUE(satisfies_aspect(l, omega)) << to_string(l);
    ASSERT_LE(s.area(), l.area());
    const bool long_fits = std::max(bbox.width, static_cast<int>(std::lround(bbox.height * omega.value()))) <= d.width &&
                           std::max(bbox.height, static_cast<int>(std::lround(bbox.width / omega.value()))) <= d.height;
    if (long_fits) ASSERT_TRUE(contains(l, bbox)) << to_string(l) << " vs " << to_string(bbox);
  }
}

TEST(BaselineCrop, EmptySaliencyWithLayoutKeepsLayout) {
  const CropBox layout{30, 10, 40, 20};
  const auto phi = LayoutConstraint::single(layout);
  for (EdgeMode mode : {EdgeMode::Short, EdgeMode::Long}) {
    const CropBox b = baseline_crop(Heatmap::filled({16, 16}, 0.0), phi, AspectRatio(2.0), mode, {128, 96});
    EXPECT_EQ(b, layout);
    EXPECT_DOUBLE_EQ(v_layout(phi, b), 1.0);
  }
}

TEST(BaselineCrop, EmptyEverythingFallsBackToFrame) {
  const CropBox b = baseline_crop(Heatmap::filled({8, 8}, 0.0), {}, AspectRatio(1.0), EdgeMode::Long, {100, 60});
  EXPECT_EQ(b, (CropBox{20, 0, 60, 60}));
}

TEST(BaselineCrop, SaliencyCellsMapToImage) {
  std::vector<double> v(16, 0.0);
  v[1 * 4 + 1] = 1.0;
  const CropBox b = baseline_crop(Heatmap({4, 4}, v), {}, AspectRatio(1.0), EdgeMode::Short, {100, 100});
  EXPECT_EQ(b, (CropBox{25, 25, 25, 25}));
}

TEST(EdgeMode, Parse) {
  EXPECT_EQ(edge_mode_from_string("short"), EdgeMode::Short);
  EXPECT_EQ(edge_mode_from_string("long_edge"), EdgeMode::Long);
  EXPECT_THROW(edge_mode_from_string("mid"), Error);
}

}  // namespace
}  // namespace condcrop
