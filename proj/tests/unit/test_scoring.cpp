#include <gtest/gtest.h>

#include "condcrop/error.hpp"
#include "condcrop/random.hpp"
#include "condcrop/scoring.hpp"
#include "oracles.hpp"

namespace condcrop {
namespace {

Heatmap example2x2() { return Heatmap({2, 2}, {0.5, 0.25, 0.0, 1.0}); }

Heatmap random_heatmap(Rng& rng, Dims d) {
  std::vector<double> v(static_cast<std::size_t>(d.area()));
  for (auto& x : v) x = rng.unit();
  return Heatmap(d, std::move(v));
}

CropBox random_box_in(Rng& rng, Dims d) {
  const int w = rng.uniform_int(1, d.width);
  const int h = rng.uniform_int(1, d.height);
  return {rng.uniform_int(0, d.width - w), rng.uniform_int(0, d.height - h), w, h};
}

TEST(Heatmap, RejectsOutOfRangeValuesAndBadSize) {
  EXPECT_THROW(Heatmap({2, 1}, {0.5, 1.5}), Error);
  EXPECT_THROW(Heatmap({2, 1}, {0.5, -0.1}), Error);
  EXPECT_THROW(Heatmap({2, 2}, {0.5}), Error);
}

TEST(IntegralImage, Totals) {
  EXPECT_DOUBLE_EQ(IntegralImage(Heatmap({1, 1}, {0.5})).total(), 0.5);
  EXPECT_DOUBLE_EQ(IntegralImage(example2x2()).total(), 1.75);
  EXPECT_DOUBLE_EQ(IntegralImage(Heatmap::filled({8, 8}, 0.0)).total(), 0.0);
}

TEST(IntegralImage, RegionSums) {
  const IntegralImage ii(example2x2());
  EXPECT_DOUBLE_EQ(ii.region_sum({0, 0, 2, 2}), 1.75);
  EXPECT_DOUBLE_EQ(ii.region_sum({0, 0, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(IntegralImage(Heatmap::filled({8, 8}, 0.0)).region_sum({1, 2, 3, 4}), 0.0);
  EXPECT_THROW(ii.region_sum({1, 1, 2, 1}), Error);
}

TEST(Scores, TwoByTwoExample) {
  const IntegralImage ii(example2x2());
  EXPECT_DOUBLE_EQ(v_roi(ii, {0, 0, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(v_rod(ii, {0, 0, 1, 1}), 1.75);
  EXPECT_DOUBLE_EQ(v_aesth_heatmap(ii, {0, 0, 1, 1}), 2.25);
}

TEST(Scores, IndicatorPeaksAtPlantedBox) {
  const Dims d{20, 12};
  const CropBox g{4, 3, 9, 6};
  std::vector<double> v(d.area(), 0.0);
  for (int y = g.y; y < g.bottom(); ++y)
    for (int x = g.x; x < g.right(); ++x) v[y * d.width + x] = 1.0;
  const Heatmap h(d, v);
  const IntegralImage ii(h);
  EXPECT_DOUBLE_EQ(v_aesth_heatmap(ii, g), static_cast<double>(d.area()));
  Rng rng(1);
  for (int i = 0; i < 300; ++i) {
    const CropBox b = random_box_in(rng, d);
    if (b == g) continue;
    EXPECT_LT(v_aesth_heatmap(ii, b), d.area());
  }
  EXPECT_EQ(oracle::best_box_of_size(h, g.width, g.height), g);
}

TEST(Scores, AllZerosClosedForm) {
  const IntegralImage ii(Heatmap::filled({10, 7}, 0.0));
  EXPECT_DOUBLE_EQ(v_aesth_heatmap(ii, {2, 1, 4, 3}), 70.0 - 12.0);
}

TEST(Scores, MatchPerCellOracle) {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Dims d{rng.uniform_int(1, 40), rng.uniform_int(1, 40)};
    const Heatmap h = random_heatmap(rng, d);
    const IntegralImage ii(h);
    const CropBox b = random_box_in(rng, d);
    EXPECT_NEAR(v_roi(ii, b), oracle::roi(h, b), 1e-9);
    EXPECT_NEAR(v_rod(ii, b), oracle::rod(h, b), 1e-9);
    EXPECT_NEAR(v_aesth_heatmap(ii, b), oracle::aesth(h, b), 1e-9);
    const double closed = 2.0 * oracle::cell_sum(h, b) - static_cast<double>(b.area()) +
                          (static_cast<double>(d.area()) - ii.total());
    EXPECT_NEAR(v_aesth_heatmap(ii, b), closed, 1e-9);
  }
}

TEST(Layout, Recall) {
  const auto phi = LayoutConstraint::single({10, 10, 10, 10});
  EXPECT_DOUBLE_EQ(v_layout(phi, {0, 0, 50, 50}), 1.0);
  EXPECT_DOUBLE_EQ(v_layout(phi, {0, 0, 15, 50}), 0.5);
  EXPECT_DOUBLE_EQ(v_layout(phi, {30, 30, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(v_layout(LayoutConstraint(), {0, 0, 1, 1}), 1.0);
}

TEST(Layout, UnionRecallMatchesRasterOracle) {
  Rng rng(8);
  const Dims d{48, 40};
  for (int i = 0; i < 300; ++i) {
    std::vector<CropBox> boxes;
    std::vector<LayoutRegion> regions;
    const int n = rng.uniform_int(1, 4);
    for (int k = 0; k < n; ++k) {
      boxes.push_back(random_box_in(rng, d));
      regions.push_back({boxes.back(), 1.0});
    }
    const LayoutConstraint phi(regions);
    const CropBox b = random_box_in(rng, d);
    EXPECT_NEAR(v_layout(phi, b), oracle::layout_recall(boxes, b, d.width, d.height), 1e-12);
    EXPECT_GE(phi.area(), 1);
  }
}

TEST(Layout, NegativeRegionPenalizesCoverage) {
  const LayoutConstraint phi({{{0, 0, 10, 10}, 1.0}, {{20, 0, 10, 10}, -1.0}});
  EXPECT_DOUBLE_EQ(v_layout(phi, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(v_layout(phi, {0, 0, 30, 10}), 0.0);
  EXPECT_DOUBLE_EQ(v_layout(phi, {0, 0, 25, 10}), 0.5);
  EXPECT_EQ(phi.area(), 100);
}

TEST(Layout, FitsChecksBounds) {
  EXPECT_TRUE(LayoutConstraint::single({0, 0, 100, 15}).fits({100, 100}));
  EXPECT_FALSE(LayoutConstraint::single({90, 0, 20, 15}).fits({100, 100}));
}

TEST(TotalScore, Combiner) {
  ScoreWeights w;
  EXPECT_DOUBLE_EQ(total_score(w, 2.25, 1.0), 10002.25);
  EXPECT_DOUBLE_EQ(total_score(w, 3.0, 1.0) - total_score(w, 3.0, 0.5), 5000.0);
  w.alpha = 0.0;
  EXPECT_DOUBLE_EQ(total_score(w, 7.5, 0.3), 7.5);
  ScoreWeights soft{1e4, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(total_score(soft, 1.0, 0.5, 0.25), 1.0 + 0.5 + 1.5);
}

TEST(ScoreCrop, IdentityScalingMatchesComponents) {
  const Heatmap h = example2x2();
  const IntegralImage ii(h);
  const auto phi = LayoutConstraint::single({0, 0, 1, 1});
  const auto b = score_crop(ii, phi, ScoreWeights{}, {0, 0, 1, 1}, {2, 2});
  EXPECT_DOUBLE_EQ(b.v_aesth, 2.25);
  EXPECT_DOUBLE_EQ(b.v_layout, 1.0);
  EXPECT_DOUBLE_EQ(b.total, 10002.25);
  EXPECT_THROW(score_crop(ii, phi, ScoreWeights{}, {1, 1, 2, 2}, {2, 2}), Error);
}

TEST(ScoreCrop, FullFrameMapsToFullGrid) {
  Rng rng(4);
  const Heatmap h = random_heatmap(rng, {64, 64});
  const IntegralImage ii(h);
  const auto b = score_crop(ii, {}, ScoreWeights{}, {0, 0, 256, 256}, {256, 256});
  EXPECT_NEAR(b.v_aesth, ii.total(), 1e-9);
}

TEST(ScoreCrop, PlantedBoxWithLayout) {
  const Dims d{16, 16};
  const CropBox g{2, 3, 8, 6};
  std::vector<double> v(d.area(), 0.0);
  for (int y = g.y; y < g.bottom(); ++y)
    for (int x = g.x; x < g.right(); ++x) v[y * d.width + x] = 1.0;
  const HeatmapScorer scorer(Heatmap(d, v), LayoutConstraint::single({3, 4, 2, 2}), ScoreWeights{}, d);
  EXPECT_DOUBLE_EQ(scorer(g).total, 256.0 + 1e4);
}

TEST(Heatmap, ResamplePreservesMean) {
  Rng rng(6);
  const Heatmap h = random_heatmap(rng, {37, 23});
  const Heatmap r = h.resampled({10, 9});
  EXPECT_NEAR(IntegralImage(h).total() / h.dims().area(), IntegralImage(r).total() / r.dims().area(), 1e-9);
}

}  // namespace
}  // namespace condcrop
