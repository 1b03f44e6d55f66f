#include "condcrop/image_io.hpp"

#include <png.h>

#include <csetjmp>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

#include "condcrop/error.hpp"

namespace condcrop {
namespace {

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0;
}

struct MemoryReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->pos + count > reader->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(out, reader->bytes.data() + reader->pos, count);
  reader->pos += count;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t count) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + count);
}

void png_flush_noop(png_structp) {}

void png_warn_silent(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; these helpers keep every C++ object with
// a destructor outside the setjmp frame and translate failures afterwards.
struct PngDecodeState {
  MemoryReader reader;
  PixelImage image;
  std::vector<png_bytep> rows;
  const char* failure = nullptr;
};

bool decode_png_raw(PngDecodeState* st) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn_silent);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &st->reader, png_read_from_memory);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if ((color & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int channels = png_get_channels(png, info);
  if ((channels != 1 && channels != 3) || width == 0 || height == 0 || width > (1u << 15) || height > (1u << 15)) {
    st->failure = "unsupported PNG layout";
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  st->image.dims = Dims{static_cast<int>(width), static_cast<int>(height)};
  st->image.channels = channels;
  st->image.values.assign(static_cast<std::size_t>(width) * height * channels, 0);
  st->rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    st->rows[y] = st->image.values.data() + static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, st->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

PixelImage decode_png(std::span<const std::uint8_t> bytes) {
  PngDecodeState st{MemoryReader{bytes, 0}, PixelImage{}, {}, nullptr};
  if (!decode_png_raw(&st)) {
    if (st.failure) throw Error(ErrorKind::UnsupportedFormat, st.failure);
    throw Error(ErrorKind::CorruptFile, "malformed PNG data");
  }
  return std::move(st.image);
}

bool encode_png_raw(const PixelImage* image, std::vector<std::uint8_t>* out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn_silent);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image->dims.width), static_cast<png_uint_32>(image->dims.height), 8,
               image->channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(image->dims.width) * image->channels;
  for (int y = 0; y < image->dims.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image->values.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

class PnmParser {
 public:
  explicit PnmParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  PixelImage parse() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') throw Error(ErrorKind::UnsupportedFormat, "not a PNM file");
    const char kind = static_cast<char>(bytes_[1]);
    pos_ = 2;
    int channels = 0;
    bool binary = false;
    switch (kind) {
      case '2': channels = 1; break;
      case '3': channels = 3; break;
      case '5': channels = 1; binary = true; break;
      case '6': channels = 3; binary = true; break;
      default: throw Error(ErrorKind::UnsupportedFormat, std::string("unsupported PNM type P") + kind);
    }
    const int width = next_int();
    const int height = next_int();
    const int maxval = next_int();
    if (width < 1 || height < 1 || width > 1 << 15 || height > 1 << 15) {
      throw Error(ErrorKind::CorruptFile, "PNM dimensions out of range");
    }
    if (maxval < 1 || maxval > 255) throw Error(ErrorKind::UnsupportedFormat, "only 8-bit PNM is supported");
    PixelImage image(Dims{width, height}, channels);
    const std::size_t count = image.values.size();
    if (binary) {
      ++pos_;  // single whitespace after maxval
      if (pos_ + count > bytes_.size()) throw Error(ErrorKind::CorruptFile, "truncated PNM raster");
      for (std::size_t i = 0; i < count; ++i) image.values[i] = rescale(bytes_[pos_ + i], maxval);
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        const int v = next_int();
        if (v > maxval) throw Error(ErrorKind::CorruptFile, "PNM sample exceeds maxval");
        image.values[i] = rescale(v, maxval);
      }
    }
    return image;
  }

 private:
  static std::uint8_t rescale(int v, int maxval) {
    if (maxval == 255) return static_cast<std::uint8_t>(v);
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char c = static_cast<char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) throw Error(ErrorKind::CorruptFile, "malformed PNM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1 << 20) throw Error(ErrorKind::CorruptFile, "PNM number too large");
      ++pos_;
    }
    return static_cast<int>(v);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

PixelImage::PixelImage(Dims d, int c)
    : dims(d), channels(c), values(static_cast<std::size_t>(d.area()) * c, 0) {}

PixelImage::PixelImage(Dims d, int c, std::vector<std::uint8_t> v) : dims(d), channels(c), values(std::move(v)) {
  if (!d.valid() || (c != 1 && c != 3) || values.size() != static_cast<std::size_t>(d.area()) * c) {
    throw Error(ErrorKind::InvalidArgument, "pixel buffer does not match dims and channels");
  }
}

PixelImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') return PnmParser(bytes).parse();
  throw Error(ErrorKind::UnsupportedFormat, "expected PNG or PNM data");
}

PixelImage load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

std::vector<std::uint8_t> encode_png(const PixelImage& image) {
  std::vector<std::uint8_t> out;
  if (!encode_png_raw(&image, &out)) throw Error(ErrorKind::Io, "PNG encoding failed");
  return out;
}

std::vector<std::uint8_t> encode_pnm(const PixelImage& image) {
  const std::string header = std::string(image.channels == 3 ? "P6" : "P5") + "\n" + std::to_string(image.dims.width) +
                             " " + std::to_string(image.dims.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.values.begin(), image.values.end());
  return out;
}

void save_image(const std::filesystem::path& path, const PixelImage& image) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  write_file(path, ext == ".png" ? encode_png(image) : encode_pnm(image));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

PixelImage to_rgb(const PixelImage& image) {
  if (image.channels == 3) return image;
  PixelImage out(image.dims, 3);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    out.values[3 * i] = out.values[3 * i + 1] = out.values[3 * i + 2] = image.values[i];
  }
  return out;
}

void draw_box(PixelImage& rgb, const CropBox& box, Rgb color, int thickness) {
  const int x0 = std::clamp(box.x, 0, rgb.dims.width - 1);
  const int y0 = std::clamp(box.y, 0, rgb.dims.height - 1);
  const int x1 = std::clamp(box.right() - 1, 0, rgb.dims.width - 1);
  const int y1 = std::clamp(box.bottom() - 1, 0, rgb.dims.height - 1);
  auto put = [&](int x, int y) {
    rgb.at(x, y, 0) = color.r;
    rgb.at(x, y, 1) = color.g;
    rgb.at(x, y, 2) = color.b;
  };
  for (int t = 0; t < thickness; ++t) {
    for (int x = x0; x <= x1; ++x) {
      put(x, std::min(y0 + t, y1));
      put(x, std::max(y1 - t, y0));
    }
    for (int y = y0; y <= y1; ++y) {
      put(std::min(x0 + t, x1), y);
      put(std::max(x1 - t, x0), y);
    }
  }
}

}  // namespace condcrop
