#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "condcrop/dataset.hpp"
#include "condcrop/error.hpp"

namespace condcrop {
namespace {

TEST(Templates, SquareImage) {
  const auto t = layout_templates({100, 100});
  EXPECT_EQ(t.size(), 8u);
  EXPECT_EQ(t[0], (CropBox{0, 0, 100, 15}));
  EXPECT_EQ(t[1], (CropBox{0, 85, 100, 15}));
  EXPECT_EQ(t[2], (CropBox{0, 0, 15, 100}));
  EXPECT_EQ(t[3], (CropBox{85, 0, 15, 100}));
  EXPECT_EQ(t[4], (CropBox{0, 0, 50, 50}));
  EXPECT_EQ(t[7], (CropBox{50, 50, 50, 50}));
}

TEST(Templates, OddSizesStayInBounds) {
  for (Dims d : {Dims{11, 13}, Dims{101, 57}, Dims{640, 427}}) {
    for (const auto& b : layout_templates(d)) EXPECT_TRUE(fits(b, d)) << to_string(b);
  }
}

TEST(Build, FullFrameHitsAllTemplates) {
  const auto tuples = build_benchmark({{"img", {120, 80}, {{0, 0, 120, 80}}}});
  ASSERT_EQ(tuples.size(), 8u);
  for (const auto& t : tuples) {
    EXPECT_EQ(t.violation(), "");
    EXPECT_EQ(t.omega_num, 3);
    EXPECT_EQ(t.omega_den, 2);
  }
}

TEST(Build, QuadrantOnly) {
  const auto tuples = build_benchmark({{"img", {100, 100}, {{0, 0, 50, 50}}}});
  ASSERT_EQ(tuples.size(), 1u);
  EXPECT_EQ(tuples[0].layout, (CropBox{0, 0, 50, 50}));
  EXPECT_EQ(tuples[0].gt_box, (CropBox{0, 0, 50, 50}));
}

TEST(Build, NothingContained) {
  EXPECT_TRUE(build_benchmark({{"img", {100, 100}, {{20, 20, 30, 30}}}}).empty());
}

TEST(Tuple, Violations) {
  BenchmarkTuple t{"a", {100, 100}, {0, 0, 50, 50}, 1, 1, {0, 0, 50, 50}};
  EXPECT_EQ(t.violation(), "");
  t.layout = {0, 0, 60, 15};
  EXPECT_NE(t.violation(), "");
  t.layout = {0, 0, 50, 50};
  t.omega_num = 2;
  EXPECT_NE(t.violation(), "");
}

TEST(Jsonl, RoundTripWithOrderedKeys) {
  const auto tuples = build_benchmark({{"img", {120, 80}, {{0, 0, 120, 80}, {0, 0, 60, 40}}}});
  std::stringstream ss;
  write_benchmark_jsonl(ss, tuples);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("{\"image_id\":\"img\",\"width\":120,\"height\":80,\"layout\":{", 0), 0u);
  const auto back = read_benchmark_jsonl(ss);
  ASSERT_EQ(back.size(), tuples.size());
  std::ostringstream again;
  write_benchmark_jsonl(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(Jsonl, RejectsInvalidTuple) {
  std::istringstream in(
      R"({"image_id":"a","width":100,"height":100,"layout":{"x":0,"y":0,"w":100,"h":15},"omega_num":1,"omega_den":1,"gt":{"x":0,"y":0,"w":50,"h":50}})");
  EXPECT_THROW(read_benchmark_jsonl(in), Error);
}

}  // namespace
}  // namespace condcrop
