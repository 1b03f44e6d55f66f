#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "condcrop/geometry.hpp"

namespace condcrop {

/// 8-bit image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct PixelImage {
  Dims dims;
  int channels = 1;
  std::vector<std::uint8_t> values;

  PixelImage() = default;
  PixelImage(Dims d, int c);
  PixelImage(Dims d, int c, std::vector<std::uint8_t> v);

  std::uint8_t& at(int x, int y, int c = 0) {
    return values[(static_cast<std::size_t>(y) * dims.width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return values[(static_cast<std::size_t>(y) * dims.width + x) * channels + c];
  }
};

/// Decodes PNG or binary/ASCII PNM (P2, P3, P5, P6) from memory.
PixelImage decode_image(std::span<const std::uint8_t> bytes);
PixelImage load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const PixelImage& image);
std::vector<std::uint8_t> encode_pnm(const PixelImage& image);

/// Writes PNG for ".png", PGM/PPM otherwise.
void save_image(const std::filesystem::path& path, const PixelImage& image);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

struct Rgb {
  std::uint8_t r, g, b;
};

/// Returns an RGB copy of `image` (gray replicated) and draws box outlines on it.
PixelImage to_rgb(const PixelImage& image);
void draw_box(PixelImage& rgb, const CropBox& box, Rgb color, int thickness = 2);

}  // namespace condcrop
