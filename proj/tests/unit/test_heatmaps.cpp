#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "condcrop/error.hpp"
#include "condcrop/heatmaps.hpp"
#include "condcrop/image_io.hpp"

namespace condcrop {
namespace {

std::span<const std::uint8_t> bytes_of(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("condcrop_test_" + name);
}

TEST(HeatmapFormats, PgmMapping) {
  std::string pgm = "P5\n2 1\n255\n";
  pgm += static_cast<char>(255);
  pgm += static_cast<char>(128);
  const Heatmap h = decode_heatmap(bytes_of(pgm));
  EXPECT_EQ(h.dims(), (Dims{2, 1}));
  EXPECT_DOUBLE_EQ(h.at(0, 0), 1.0);
  EXPECT_NEAR(h.at(1, 0), 0.50196, 1e-5);
  EXPECT_DOUBLE_EQ(h.at(1, 0), 128.0 / 255.0);
}

TEST(HeatmapFormats, AsciiPgmAllWhite) {
  const Heatmap h = decode_heatmap(bytes_of("P2\n3 2\n255\n255 255 255\n255 255 255\n"));
  for (double v : h.values()) EXPECT_EQ(v, 1.0);
}

TEST(HeatmapFormats, CsvExample) {
  const Heatmap h = parse_heatmap_csv("2 2\n0.5,0.25\n0.0,1.0\n");
  EXPECT_EQ(h.dims(), (Dims{2, 2}));
  EXPECT_EQ(std::vector<double>(h.values().begin(), h.values().end()), (std::vector<double>{0.5, 0.25, 0.0, 1.0}));
  EXPECT_DOUBLE_EQ(IntegralImage(h).total(), 1.75);
}

TEST(HeatmapFormats, CsvErrors) {
  EXPECT_THROW(parse_heatmap_csv("2 2\n0.5,0.25\n"), Error);
  EXPECT_THROW(parse_heatmap_csv("1 2\n0.5,1.5\n"), Error);
  EXPECT_THROW(parse_heatmap_csv("1 2\n0.5\n"), Error);
  EXPECT_THROW(parse_heatmap_csv("x\n"), Error);
  EXPECT_THROW(decode_heatmap(bytes_of("GIF89a")), Error);
}

TEST(HeatmapFormats, RoundTripsThroughFiles) {
  const Heatmap h({3, 2}, {0.0, 0.2, 1.0, 0.4, 0.6, 0.8});
  const auto csv = temp_path("rt.csv");
  save_heatmap(csv, h);
  const Heatmap c = load_heatmap(csv);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(c.values()[i], h.values()[i]);

  for (const char* ext : {"rt.png", "rt.pgm"}) {
    const auto p = temp_path(ext);
    save_heatmap(p, h);
    const Heatmap r = load_heatmap(p);
    ASSERT_EQ(r.dims(), h.dims());
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(r.values()[i], h.values()[i], 0.5 / 255.0 + 1e-12);
    std::filesystem::remove(p);
  }
  std::filesystem::remove(csv);
  EXPECT_THROW(load_heatmap(temp_path("missing.csv")), Error);
  EXPECT_THROW(load_heatmap(temp_path("x.bmp")), Error);
}

TEST(ImageIo, PngRgbRoundTrip) {
  PixelImage img({4, 3}, 3);
  for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = static_cast<std::uint8_t>(i * 7);
  const PixelImage back = decode_image(encode_png(img));
  EXPECT_EQ(back.dims, img.dims);
  EXPECT_EQ(back.channels, 3);
  EXPECT_EQ(back.values, img.values);
  std::vector<std::uint8_t> corrupt = encode_png(img);
  corrupt.resize(corrupt.size() / 2);
  EXPECT_THROW(decode_image(corrupt), Error);
}

TEST(Annotations, JsonlRoundTripAndValidation) {
  const std::vector<AnnotationRecord> recs{{"a", {100, 80}, {{0, 0, 50, 40}, {10, 10, 20, 20}}}, {"b", {30, 30}, {{0, 0, 30, 30}}}};
  std::stringstream ss;
  write_annotations_jsonl(ss, recs);
  const auto back = read_annotations_jsonl(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].image_id, "a");
  EXPECT_EQ(back[0].gt_boxes, recs[0].gt_boxes);
  std::istringstream bad(R"({"image_id":"c","width":10,"height":10,"gt_boxes":[{"x":5,"y":5,"w":10,"h":1}]})");
  EXPECT_THROW(read_annotations_jsonl(bad), Error);
}

TEST(PseudoHeatmap, Counting) {
  const AnnotationRecord one{"x", {4, 4}, {{1, 1, 2, 2}}};
  const Heatmap h1 = pseudo_heatmap(one, {4, 4});
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) EXPECT_EQ(h1.at(x, y), (x >= 1 && x < 3 && y >= 1 && y < 3) ? 1.0 : 0.0);

  const AnnotationRecord two{"y", {4, 4}, {{0, 0, 2, 2}, {1, 1, 2, 2}}};
  const Heatmap h2 = pseudo_heatmap(two, {4, 4});
  EXPECT_EQ(h2.at(1, 1), 1.0);
  EXPECT_EQ(h2.at(0, 0), 0.5);
  EXPECT_EQ(h2.at(2, 2), 0.5);
  EXPECT_EQ(h2.at(3, 3), 0.0);

  const AnnotationRecord same{"z", {4, 4}, {{1, 0, 2, 3}, {1, 0, 2, 3}, {1, 0, 2, 3}}};
  const Heatmap h3 = pseudo_heatmap(same, {4, 4});
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) EXPECT_EQ(h3.at(x, y), (x >= 1 && x < 3 && y < 3) ? 1.0 : 0.0);
}

TEST(Saliency, ConstantImageIsZero) {
  PixelImage img({50, 40}, 3, std::vector<std::uint8_t>(50 * 40 * 3, 77));
  const Heatmap h = heuristic_saliency(img);
  for (double v : h.values()) EXPECT_EQ(v, 0.0);
}

TEST(Saliency, BrightPatchStandsOut) {
  PixelImage img({64, 64}, 1, std::vector<std::uint8_t>(64 * 64, 0));
  for (int y = 27; y < 37; ++y)
    for (int x = 27; x < 37; ++x) img.at(x, y) = 255;
  const Heatmap h = heuristic_saliency(img, {64, 64});
  double inside = 0.0;
  for (int y = 27; y < 37; ++y)
    for (int x = 27; x < 37; ++x) inside += h.at(x, y);
  inside /= 100.0;
  EXPECT_GT(inside, h.at(2, 2));
  EXPECT_GT(inside, h.at(60, 5));
  EXPECT_GT(inside, 0.3);
}

TEST(SynthPlanted, Structure) {
  const CropBox g{2, 2, 5, 3};
  const Heatmap exact = synth_planted({10, 8}, g, 0.0, 1);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 10; ++x) EXPECT_EQ(exact.at(x, y), (x >= 2 && x < 7 && y >= 2 && y < 5) ? 1.0 : 0.0);
  const Heatmap a = synth_planted({10, 8}, g, 0.1, 1);
  const Heatmap b = synth_planted({10, 8}, g, 0.1, 2);
  bool differs = false;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 10; ++x) {
      const bool in = x >= 2 && x < 7 && y >= 2 && y < 5;
      EXPECT_EQ(a.at(x, y) >= 0.9, in);
      EXPECT_EQ(b.at(x, y) >= 0.9, in);
      differs = differs || a.at(x, y) != b.at(x, y);
    }
  }
  EXPECT_TRUE(differs);
  EXPECT_THROW(synth_planted({10, 8}, g, 0.7, 1), Error);
}

}  // namespace
}  // namespace condcrop
