#include "condcrop/dataset.hpp"

#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "condcrop/error.hpp"
#include "condcrop/json_io.hpp"

namespace condcrop {

std::string BenchmarkTuple::violation() const {
  if (!fits(gt_box, dims)) return "gt box outside image";
  if (!fits(layout, dims)) return "layout box outside image";
  if (!contains(gt_box, layout)) return "gt box does not contain layout";
  if (omega_num < 1 || omega_den < 1) return "non-positive ratio";
  if (std::int64_t{gt_box.width} * omega_den != std::int64_t{gt_box.height} * omega_num) {
    return "ratio differs from gt box";
  }
  return {};
}

std::array<CropBox, 8> layout_templates(const Dims& dims) {
  if (dims.width < 10 || dims.height < 10) throw Error(ErrorKind::InvalidArgument, "templates need at least 10x10");
  const int W = dims.width;
  const int H = dims.height;
  const int strip_h = round_half_away(kStripFraction * H);
  const int strip_w = round_half_away(kStripFraction * W);
  const int qw = (W + 1) / 2;
  const int qh = (H + 1) / 2;
  return {
      CropBox{0, 0, W, strip_h},
      CropBox{0, H - strip_h, W, strip_h},
      CropBox{0, 0, strip_w, H},
      CropBox{W - strip_w, 0, strip_w, H},
      CropBox{0, 0, qw, qh},
      CropBox{W - qw, 0, qw, qh},
      CropBox{0, H - qh, qw, qh},
      CropBox{W - qw, H - qh, qw, qh},
  };
}

std::vector<BenchmarkTuple> build_benchmark(const std::vector<AnnotationRecord>& records) {
  std::vector<BenchmarkTuple> out;
  for (const auto& r : records) {
    r.validate();
    if (r.dims.width < 10 || r.dims.height < 10) continue;
    const auto templates = layout_templates(r.dims);
    for (const auto& gt : r.gt_boxes) {
      const int g = std::gcd(gt.width, gt.height);
      for (const auto& t : templates) {
        if (!contains(gt, t)) continue;
        out.push_back(BenchmarkTuple{r.image_id, r.dims, t, gt.width / g, gt.height / g, gt});
      }
    }
  }
  return out;
}

void write_benchmark_jsonl(std::ostream& out, const std::vector<BenchmarkTuple>& tuples) {
  for (const auto& t : tuples) {
    ordered_json j;
    j["image_id"] = t.image_id;
    j["width"] = t.dims.width;
    j["height"] = t.dims.height;
    j["layout"] = box_to_json(t.layout);
    j["omega_num"] = t.omega_num;
    j["omega_den"] = t.omega_den;
    j["gt"] = box_to_json(t.gt_box);
    out << j.dump() << '\n';
  }
}

std::vector<BenchmarkTuple> read_benchmark_jsonl(std::istream& in) {
  std::vector<BenchmarkTuple> tuples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      BenchmarkTuple t;
      t.image_id = j.at("image_id").get<std::string>();
      t.dims = Dims{j.at("width").get<int>(), j.at("height").get<int>()};
      t.layout = box_from_json(j.at("layout"));
      t.omega_num = j.at("omega_num").get<int>();
      t.omega_den = j.at("omega_den").get<int>();
      t.gt_box = box_from_json(j.at("gt"));
      if (auto why = t.violation(); !why.empty()) {
        throw Error(ErrorKind::CorruptFile, "benchmark line " + std::to_string(line_no) + ": " + why);
      }
      tuples.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::CorruptFile, "benchmark line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return tuples;
}

std::vector<BenchmarkTuple> load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_benchmark_jsonl(in);
}

}  // namespace condcrop
