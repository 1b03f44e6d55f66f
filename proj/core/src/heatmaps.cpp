#include "condcrop/heatmaps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "condcrop/error.hpp"
#include "condcrop/json_io.hpp"
#include "condcrop/random.hpp"

namespace condcrop {
namespace {

std::string lower_ext(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::CorruptFile, "bad number '" + std::string(s) + "' in heatmap CSV");
  }
  return v;
}

// Mean over the clamped (2r+1)^2 window around every cell.
std::vector<double> box_blur(const IntegralImage& ii, int r) {
  const Dims d = ii.dims();
  std::vector<double> out(static_cast<std::size_t>(d.area()));
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      const int x0 = std::max(0, x - r);
      const int y0 = std::max(0, y - r);
      const int x1 = std::min(d.width, x + r + 1);
      const int y1 = std::min(d.height, y + r + 1);
      const CropBox win{x0, y0, x1 - x0, y1 - y0};
      out[static_cast<std::size_t>(y) * d.width + x] = ii.region_sum(win) / static_cast<double>(win.area());
    }
  }
  return out;
}

}  // namespace

void AnnotationRecord::validate() const {
  if (!dims.valid()) throw Error(ErrorKind::InvalidArgument, "record '" + image_id + "' has invalid dims");
  if (gt_boxes.empty()) throw Error(ErrorKind::InvalidArgument, "record '" + image_id + "' has no boxes");
  for (const auto& b : gt_boxes) {
    if (!fits(b, dims)) throw Error(ErrorKind::InvalidArgument, "record '" + image_id + "' box " + to_string(b) + " out of bounds");
  }
}

std::vector<AnnotationRecord> read_annotations_jsonl(std::istream& in) {
  std::vector<AnnotationRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AnnotationRecord r;
      r.image_id = j.at("image_id").get<std::string>();
      r.dims = Dims{j.at("width").get<int>(), j.at("height").get<int>()};
      for (const auto& b : j.at("gt_boxes")) r.gt_boxes.push_back(box_from_json(b));
      r.validate();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::CorruptFile, "annotation line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_annotations_jsonl(in);
}

void write_annotations_jsonl(std::ostream& out, const std::vector<AnnotationRecord>& records) {
  for (const auto& r : records) {
    ordered_json j;
    j["image_id"] = r.image_id;
    j["width"] = r.dims.width;
    j["height"] = r.dims.height;
    j["gt_boxes"] = ordered_json::array();
    for (const auto& b : r.gt_boxes) j["gt_boxes"].push_back(box_to_json(b));
    out << j.dump() << '\n';
  }
}

Heatmap heatmap_from_image(const PixelImage& image) {
  std::vector<double> values(static_cast<std::size_t>(image.dims.area()));
  for (int y = 0; y < image.dims.height; ++y) {
    for (int x = 0; x < image.dims.width; ++x) {
      double v = image.at(x, y, 0);
      if (image.channels == 3) v = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) + 0.114 * image.at(x, y, 2);
      values[static_cast<std::size_t>(y) * image.dims.width + x] = std::clamp(v / 255.0, 0.0, 1.0);
    }
  }
  return Heatmap(image.dims, std::move(values));
}

PixelImage heatmap_to_image(const Heatmap& heatmap) {
  PixelImage image(heatmap.dims(), 1);
  const auto v = heatmap.values();
  for (std::size_t i = 0; i < v.size(); ++i) image.values[i] = static_cast<std::uint8_t>(std::lround(v[i] * 255.0));
  return image;
}

Heatmap parse_heatmap_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw Error(ErrorKind::CorruptFile, "empty heatmap CSV");

  std::istringstream header{std::string(lines[0])};
  int h = 0;
  int w = 0;
  if (!(header >> h >> w) || h < 1 || w < 1) throw Error(ErrorKind::CorruptFile, "heatmap CSV header must be \"H W\"");
  if (static_cast<int>(lines.size()) - 1 != h) {
    throw Error(ErrorKind::CorruptFile, "heatmap CSV has " + std::to_string(lines.size() - 1) + " rows, expected " + std::to_string(h));
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(h) * w);
  for (int row = 0; row < h; ++row) {
    std::string_view line = lines[static_cast<std::size_t>(row) + 1];
    int count = 0;
    while (true) {
      const auto comma = line.find(',');
      const double v = parse_real(line.substr(0, comma));
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::CorruptFile, "heatmap CSV value outside [0, 1]");
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (count != w) throw Error(ErrorKind::CorruptFile, "heatmap CSV row " + std::to_string(row) + " has wrong width");
  }
  return Heatmap(Dims{w, h}, std::move(values));
}

std::string format_heatmap_csv(const Heatmap& heatmap) {
  std::string out = std::to_string(heatmap.dims().height) + " " + std::to_string(heatmap.dims().width) + "\n";
  char buf[32];
  for (int y = 0; y < heatmap.dims().height; ++y) {
    for (int x = 0; x < heatmap.dims().width; ++x) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, heatmap.at(x, y));
      if (x) out += ',';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

Heatmap decode_heatmap(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && (bytes[0] == 0x89 || (bytes[0] == 'P' && std::isdigit(bytes[1])))) {
    return heatmap_from_image(decode_image(bytes));
  }
  if (!bytes.empty() && (std::isdigit(bytes[0]) || std::isspace(bytes[0]))) {
    return parse_heatmap_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  throw Error(ErrorKind::UnsupportedFormat, "heatmap must be PNG, PGM or CSV");
}

Heatmap load_heatmap(const std::filesystem::path& path) {
  const auto ext = lower_ext(path);
  if (!ext.empty() && ext != ".png" && ext != ".pgm" && ext != ".pnm" && ext != ".csv" && ext != ".txt") {
    throw Error(ErrorKind::UnsupportedFormat, "unsupported heatmap extension '" + ext + "'");
  }
  return decode_heatmap(read_file(path));
}

void save_heatmap(const std::filesystem::path& path, const Heatmap& heatmap) {
  const auto ext = lower_ext(path);
  if (ext == ".csv" || ext == ".txt") {
    const auto text = format_heatmap_csv(heatmap);
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  } else if (ext == ".png" || ext == ".pgm") {
    save_image(path, heatmap_to_image(heatmap));
  } else {
    throw Error(ErrorKind::UnsupportedFormat, "unsupported heatmap extension '" + ext + "'");
  }
}

Heatmap pseudo_heatmap(const AnnotationRecord& record, Dims out_dims) {
  record.validate();
  std::vector<int> counts(static_cast<std::size_t>(out_dims.area()), 0);
  for (const auto& b : record.gt_boxes) {
    const CropBox s = scale_box(b, record.dims, out_dims);
    for (int y = s.y; y < s.bottom(); ++y) {
      for (int x = s.x; x < s.right(); ++x) ++counts[static_cast<std::size_t>(y) * out_dims.width + x];
    }
  }
  const double n = static_cast<double>(record.gt_boxes.size());
  std::vector<double> values(counts.size());
  std::transform(counts.begin(), counts.end(), values.begin(), [n](int c) { return c / n; });
  return Heatmap(out_dims, std::move(values));
}

Heatmap heuristic_saliency(const PixelImage& image, Dims out_dims) {
  const Heatmap lum = heatmap_from_image(image).resampled(out_dims);
  const IntegralImage ii(lum);
  const int surround = std::max(2, std::max(out_dims.width, out_dims.height) / 8);
  const auto center = box_blur(ii, 1);
  const auto around = box_blur(ii, surround);
  std::vector<double> values(center.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::abs(center[i] - around[i]);
    peak = std::max(peak, values[i]);
  }
  // Sub-1e-12 responses are floating-point residue from a constant field.
  if (peak < 1e-12) return Heatmap::filled(out_dims, 0.0);
  for (double& v : values) v = std::clamp(v / peak, 0.0, 1.0);
  return Heatmap(out_dims, std::move(values));
}

Heatmap synth_planted(Dims dims, const CropBox& planted, double noise_amp, std::uint64_t seed) {
  if (!fits(planted, dims)) throw Error(ErrorKind::InvalidArgument, "planted box outside the grid");
  if (!(noise_amp >= 0.0 && noise_amp <= 0.5)) throw Error(ErrorKind::InvalidArgument, "noise amplitude must be in [0, 0.5]");
  Rng rng(seed);
  std::vector<double> values(static_cast<std::size_t>(dims.area()));
  for (int y = 0; y < dims.height; ++y) {
    for (int x = 0; x < dims.width; ++x) {
      const bool inside = x >= planted.x && x < planted.right() && y >= planted.y && y < planted.bottom();
      const double noise = noise_amp * rng.unit();
      values[static_cast<std::size_t>(y) * dims.width + x] = std::clamp(inside ? 1.0 - noise : noise, 0.0, 1.0);
    }
  }
  return Heatmap(dims, std::move(values));
}

}  // namespace condcrop
