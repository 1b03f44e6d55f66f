#include <gtest/gtest.h>

#include <cmath>

#include "condcrop/error.hpp"
#include "condcrop/geometry.hpp"
#include "condcrop/random.hpp"
#include "oracles.hpp"

namespace condcrop {
namespace {

CropBox random_box(Rng& rng, int grid) {
  const int w = rng.uniform_int(1, grid);
  const int h = rng.uniform_int(1, grid);
  return CropBox{rng.uniform_int(0, grid - w), rng.uniform_int(0, grid - h), w, h};
}

TEST(Iou, IdentityDisjointAndPartial) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {100, 100, 5, 5}), 0.0);
  // Frozen from oracle::pixel_iou on a 20x10 grid: 50 / 150.
  EXPECT_DOUBLE_EQ(oracle::pixel_iou({0, 0, 10, 10}, {5, 0, 10, 10}, 20, 10), 1.0 / 3.0);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0, 1e-12);
}

TEST(Iou, TouchingEdgesDoNotOverlap) { EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0); }

TEST(Iou, MatchesPixelOracleAndIsSymmetric) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const CropBox a = random_box(rng, 64);
    const CropBox b = random_box(rng, 64);
    const double v = iou(a, b);
    EXPECT_NEAR(v, oracle::pixel_iou(a, b, 64, 64), 1e-9);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v == 1.0, a == b);
  }
}

TEST(StepMax, HandTracedValues) {
  EXPECT_DOUBLE_EQ(step_max(10, 20, {100, 100}, AspectRatio(2.0)), 45.0);
  EXPECT_DOUBLE_EQ(step_max(0, 0, {100, 100}, AspectRatio(1.0)), 100.0);
  EXPECT_DOUBLE_EQ(step_max(10, 20, {100, 100}, AspectRatio(1.0)), 80.0);
}

TEST(StepMax, OutsideImageThrows) {
  EXPECT_THROW(step_max(100, 0, {100, 100}, AspectRatio(1.0)), Error);
}

TEST(ConvertStep, HandTracedValues) {
  EXPECT_EQ(convert_step({10, 20, 30.0}, {100, 100}, AspectRatio(2.0)), (CropBox{10, 20, 60, 30}));
  EXPECT_EQ(convert_step({0, 0, 100.0}, {100, 100}, AspectRatio(1.0)), (CropBox{0, 0, 100, 100}));
  EXPECT_EQ(convert_step({10, 20, 40.0}, {100, 100}, AspectRatio(0.5)), (CropBox{10, 20, 40, 80}));
}

TEST(ConvertStep, RejectsStepAboveMaxOrRoundingToZero) {
  try {
    convert_step({10, 20, 46.0}, {100, 100}, AspectRatio(2.0));
    FAIL() << "expected StepOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StepOutOfRange);
  }
  try {
    convert_step({0, 0, 0.2}, {100, 100}, AspectRatio(1.0));
    FAIL() << "expected StepOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StepOutOfRange);
  }
  EXPECT_THROW(convert_step({0, 0, -1.0}, {100, 100}, AspectRatio(1.0)), Error);
}

TEST(ConvertStep, RandomizedFitAndBranchConsistency) {
  Rng rng(5);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const Dims dims{rng.uniform_int(1, 400), rng.uniform_int(1, 400)};
    const AspectRatio omega(std::exp((rng.unit() - 0.5) * 4.0));
    const int px = rng.uniform_int(0, dims.width - 1);
    const int py = rng.uniform_int(0, dims.height - 1);
    const double hi = step_max(px, py, dims, omega);
    const double step = rng.unit_open_low() * hi;
    CropBox box;
    try {
      box = convert_step({px, py, step}, dims, omega);
    } catch (const Error& e) {
      // Only tiny steps may fail, and only by rounding to an empty side.
      EXPECT_EQ(e.kind(), ErrorKind::StepOutOfRange);
      EXPECT_LT(std::min(step, step * std::min(omega.value(), 1.0 / omega.value())), 1.5);
      continue;
    }
    ++checked;
    ASSERT_TRUE(fits(box, dims)) << to_string(box);
    ASSERT_TRUE(satisfies_aspect(box, omega)) << to_string(box) << " omega " << omega.value();
    const double margin_ratio = static_cast<double>(dims.width - px) / (dims.height - py);
    if (margin_ratio <= omega.value()) {
      EXPECT_LE(std::abs(box.height - step), 1.0);
    } else {
      EXPECT_LE(std::abs(box.width - step), 1.0);
    }
  }
  EXPECT_GT(checked, 9000);
}

TEST(Contains, Cases) {
  EXPECT_TRUE(contains({0, 0, 10, 10}, {2, 2, 4, 4}));
  EXPECT_TRUE(contains({3, 4, 5, 6}, {3, 4, 5, 6}));
  EXPECT_FALSE(contains({0, 0, 10, 10}, {8, 8, 4, 4}));
  EXPECT_FALSE(oracle::pixel_contains({0, 0, 10, 10}, {8, 8, 4, 4}));
}

TEST(Contains, MatchesPixelOracle) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const CropBox a = random_box(rng, 24);
    const CropBox b = random_box(rng, 24);
    EXPECT_EQ(contains(a, b), oracle::pixel_contains(a, b));
  }
}

TEST(ScaleBox, Cases) {
  EXPECT_EQ(scale_box({0, 0, 256, 256}, {256, 256}, {64, 64}), (CropBox{0, 0, 64, 64}));
  EXPECT_EQ(scale_box({128, 0, 128, 256}, {256, 256}, {64, 64}), (CropBox{32, 0, 32, 64}));
  EXPECT_EQ(scale_box({10, 10, 10, 10}, {100, 100}, {100, 100}), (CropBox{10, 10, 10, 10}));
}

TEST(ScaleBox, AlwaysInBoundsWithPositiveSides) {
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const Dims from{rng.uniform_int(1, 500), rng.uniform_int(1, 500)};
    const Dims to{rng.uniform_int(1, 80), rng.uniform_int(1, 80)};
    const int w = rng.uniform_int(1, from.width);
    const int h = rng.uniform_int(1, from.height);
    const CropBox b{rng.uniform_int(0, from.width - w), rng.uniform_int(0, from.height - h), w, h};
    EXPECT_TRUE(fits(scale_box(b, from, to), to));
  }
}

TEST(AspectRatio, Parsing) {
  EXPECT_DOUBLE_EQ(AspectRatio::parse("16:9").value(), 16.0 / 9.0);
  EXPECT_DOUBLE_EQ(AspectRatio::parse("1.5").value(), 1.5);
  EXPECT_THROW(AspectRatio::parse("0:1"), Error);
  EXPECT_THROW(AspectRatio::parse("abc"), Error);
  EXPECT_THROW(AspectRatio::parse("4:"), Error);
  EXPECT_THROW(AspectRatio(-1.0), Error);
  EXPECT_TRUE(AspectRatio(3.0).is_extreme());
  EXPECT_TRUE(AspectRatio(1.0 / 3.0).is_extreme());
  EXPECT_FALSE(AspectRatio(2.0).is_extreme());
}

TEST(SatisfiesAspect, BracketsRoundedSide) {
  EXPECT_TRUE(satisfies_aspect({0, 0, 16, 9}, AspectRatio::parse("16:9")));
  EXPECT_TRUE(satisfies_aspect({0, 0, 31, 10}, AspectRatio(3.05)));
  EXPECT_FALSE(satisfies_aspect({0, 0, 35, 10}, AspectRatio(3.05)));
  EXPECT_FALSE(satisfies_aspect({0, 0, 10, 10}, AspectRatio(2.0)));
}

}  // namespace
}  // namespace condcrop
