#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "condcrop/baselines.hpp"
#include "condcrop/bench.hpp"
#include "condcrop/dataset.hpp"
#include "condcrop/error.hpp"
#include "condcrop/heatmaps.hpp"
#include "condcrop/json_io.hpp"
#include "condcrop/proposals.hpp"
#include "condcrop/server.hpp"
#include "condcrop/service.hpp"

namespace cc = condcrop;

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

int exit_code_for(cc::ErrorKind kind) {
  switch (kind) {
    case cc::ErrorKind::InfeasibleSearchSpace:
    case cc::ErrorKind::EmptyProposalSet:
    case cc::ErrorKind::StepOutOfRange:
      return kExitInfeasible;
    case cc::ErrorKind::Io:
    case cc::ErrorKind::CorruptFile:
    case cc::ErrorKind::UnsupportedFormat:
    case cc::ErrorKind::MissingHeatmap:
      return kExitIo;
    default:
      return kExitBadArgs;
  }
}

int parse_int(std::string_view s, const std::string& what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw cc::Error(cc::ErrorKind::InvalidArgument, "bad " + what);
  return v;
}

// "x,y,w,h" with an optional ":weight" suffix.
nlohmann::json parse_layout_flag(const std::string& text) {
  std::string_view s = text;
  double weight = 1.0;
  if (const auto colon = s.find(':'); colon != std::string_view::npos) {
    const auto w = s.substr(colon + 1);
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), weight);
    if (ec != std::errc{} || p != w.data() + w.size()) {
      throw cc::Error(cc::ErrorKind::InvalidArgument, "bad layout weight in '" + text + "'");
    }
    s = s.substr(0, colon);
  }
  int v[4];
  for (int i = 0; i < 4; ++i) {
    const auto comma = s.find(',');
    if ((i < 3) == (comma == std::string_view::npos)) {
      throw cc::Error(cc::ErrorKind::InvalidArgument, "layout must be x,y,w,h[:weight], got '" + text + "'");
    }
    v[i] = parse_int(s.substr(0, comma), "layout '" + text + "'");
    if (i < 3) s.remove_prefix(comma + 1);
  }
  return {{"x", v[0]}, {"y", v[1]}, {"w", v[2]}, {"h", v[3]}, {"weight", weight}};
}

cc::Dims parse_dims(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw cc::Error(cc::ErrorKind::InvalidArgument, "size must be WxH, got '" + text + "'");
  const cc::Dims d{parse_int(std::string_view(text).substr(0, x), "width"),
                   parse_int(std::string_view(text).substr(x + 1), "height")};
  if (!d.valid()) throw cc::Error(cc::ErrorKind::InvalidArgument, "size must be positive");
  return d;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  cc::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct CropArgs {
  std::string heatmap, image, image_size, aspect, method = "heatmap", strategy = "anneal";
  std::vector<std::string> layout;
  int iterations = 100;
  int initial_samples = 16;
  double alpha = 1e4;
  double step_granularity = 32.0;
  int k_start = cc::kDefaultKStart;
  int k_end = cc::kDefaultKEnd;
  std::uint64_t seed = 0;
  std::string out, overlay, trace;
};

int run_crop_cmd(const CropArgs& a) {
  nlohmann::json body;
  body["aspect"] = a.aspect;
  body["method"] = a.method;
  body["iterations"] = a.iterations;
  body["strategy"] = a.strategy;
  body["alpha"] = a.alpha;
  body["step_granularity"] = a.step_granularity;
  body["k_start"] = a.k_start;
  body["k_end"] = a.k_end;
  body["seed"] = a.seed;
  body["initial_samples"] = a.initial_samples;
  body["layout"] = nlohmann::json::array();
  for (const auto& l : a.layout) body["layout"].push_back(parse_layout_flag(l));
  if (!a.image_size.empty()) {
    const cc::Dims d = parse_dims(a.image_size);
    body["image"] = {{"width", d.width}, {"height", d.height}};
  }

  std::optional<cc::PixelImage> picture;
  cc::HeatmapSource source = [&] {
    if (!a.image.empty()) {
      picture = cc::load_image(a.image);
      return cc::source_from_image(*picture);
    }
    return cc::HeatmapSource{cc::load_heatmap(a.heatmap), std::nullopt};
  }();
  const cc::Heatmap heatmap = source.heatmap;
  const cc::CropRequest request = cc::parse_crop_request(body, std::move(source));
  const cc::CropResponse response = cc::run_crop(request);

  write_text(a.out, cc::response_to_json(response).dump() + "\n");
  if (!a.trace.empty() && response.trace) {
    std::ofstream t(a.trace);
    if (!t) throw cc::Error(cc::ErrorKind::Io, "cannot write " + a.trace);
    cc::write_trace_jsonl(t, *response.trace);
  }
  if (!a.overlay.empty()) {
    std::vector<cc::CropBox> boxes;
    for (const auto& r : request.layout.regions()) boxes.push_back(r.box);
    const cc::PixelImage bg =
        picture && picture->dims == request.image_dims ? *picture : cc::heatmap_backdrop(heatmap, request.image_dims);
    cc::save_image(a.overlay, cc::render_overlay(bg, std::nullopt, boxes, response.box));
  }
  return 0;
}

struct BenchArgs {
  std::string benchmark, annotations, heatmap_dir, out, overlay_dir;
  std::vector<std::string> methods{"heatmap"};
  cc::MethodConfig config;
  std::string strategy = "anneal";
  std::uint64_t seed = 0;
};

void add_method_flags(CLI::App* cmd, BenchArgs& a) {
  cmd->add_option("--benchmark", a.benchmark, "Benchmark tuples (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--annotations", a.annotations, "Annotation JSONL; heatmaps are pseudo-heatmaps of its records")
      ->check(CLI::ExistingFile);
  cmd->add_option("--heatmap-dir", a.heatmap_dir, "Directory of <image_id>.png/.pgm/.csv heatmaps")
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--iterations", a.config.optimizer.iterations, "Optimizer budget");
  cmd->add_option("--strategy", a.strategy, "random, anneal or tpe-lite");
  cmd->add_option("--step-granularity", a.config.optimizer.step_granularity, "Optimizer step quantum");
  cmd->add_option("--alpha", a.config.weights.alpha, "Layout weight");
  cmd->add_option("--kstart", a.config.k_start, "First proposal scale");
  cmd->add_option("--kend", a.config.k_end, "Last proposal scale");
  cmd->add_option("--threads", a.config.threads, "Proposal scoring threads");
  cmd->add_option("--seed", a.seed, "Base seed");
  cmd->add_option("--out", a.out, "CSV output path");
}

cc::HeatmapProvider provider_for(const BenchArgs& a) {
  if (!a.heatmap_dir.empty()) return cc::directory_provider(a.heatmap_dir);
  if (!a.annotations.empty()) return cc::pseudo_heatmap_provider(cc::load_annotations(a.annotations));
  throw cc::Error(cc::ErrorKind::InvalidArgument, "need --annotations or --heatmap-dir");
}

int run_bench_cmd(BenchArgs a) {
  a.config.optimizer.strategy = cc::strategy_from_string(a.strategy);
  a.config.optimizer.validate();
  const auto tuples = cc::load_benchmark(a.benchmark);
  const auto provider = provider_for(a);
  std::vector<cc::EvalReport> reports;
  std::ostringstream csv;
  for (const auto& m : a.methods) {
    if (!cc::is_known_method(m)) throw cc::Error(cc::ErrorKind::InvalidArgument, "unknown method '" + m + "'");
    cc::MethodConfig cfg = a.config;
    cfg.method = m;
    reports.push_back(cc::evaluate(m, cc::make_method(cfg), tuples, provider, a.seed));
    cc::write_report_csv(csv, reports.back());
    if (!a.overlay_dir.empty()) {
      std::filesystem::create_directories(a.overlay_dir);
      for (std::size_t i = 0; i < tuples.size(); ++i) {
        const auto& t = tuples[i];
        const auto bg = cc::heatmap_backdrop(*provider(t.image_id), t.dims);
        const auto img = cc::render_overlay(bg, t.gt_box, {t.layout}, reports.back().per_item[i].box);
        cc::save_image(std::filesystem::path(a.overlay_dir) / (m + "_" + std::to_string(i) + ".png"), img);
      }
    }
  }
  std::cout << cc::format_report_table(reports);
  if (!a.out.empty()) write_text(a.out, csv.str());
  return 0;
}

int run_dataset_cmd(const std::string& annotations, const std::string& out) {
  const auto tuples = cc::build_benchmark(cc::load_annotations(annotations));
  for (const auto& t : tuples) {
    if (auto why = t.violation(); !why.empty()) {
      throw cc::Error(cc::ErrorKind::InvalidArgument, "tuple for '" + t.image_id + "' is invalid: " + why);
    }
  }
  std::ostringstream os;
  cc::write_benchmark_jsonl(os, tuples);
  write_text(out, os.str());
  std::cerr << tuples.size() << " tuples\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional image cropping: aspect ratio and layout constrained crops"};
  app.require_subcommand(1);

  CropArgs crop;
  auto* c = app.add_subcommand("crop", "Crop one image");
  auto* src = c->add_option_group("source");
  src->add_option("--heatmap", crop.heatmap, "Heatmap file (.png, .pgm, .csv)")->check(CLI::ExistingFile);
  src->add_option("--image", crop.image, "Raw image; heuristic saliency is used")->check(CLI::ExistingFile);
  src->require_option(1);
  c->add_option("--image-size", crop.image_size, "Image size WxH when it differs from the heatmap");
  c->add_option("--aspect", crop.aspect, "W:H or decimal")->required();
  c->add_option("--layout", crop.layout, "x,y,w,h[:weight], repeatable")->allow_extra_args(false);
  c->add_option("--method", crop.method, "heatmap, proposal, baseline_short or baseline_long");
  c->add_option("--iterations", crop.iterations, "Optimizer budget");
  c->add_option("--strategy", crop.strategy, "random, anneal or tpe-lite");
  c->add_option("--initial-samples", crop.initial_samples, "Random samples before guided search");
  c->add_option("--alpha", crop.alpha, "Layout weight");
  c->add_option("--kstart", crop.k_start, "First proposal scale");
  c->add_option("--kend", crop.k_end, "Last proposal scale");
  c->add_option("--step-granularity", crop.step_granularity, "Optimizer step quantum");
  c->add_option("--seed", crop.seed, "Random seed");
  c->add_option("--out", crop.out, "Response JSON path (default stdout)");
  c->add_option("--overlay", crop.overlay, "Overlay PNG path");
  c->add_option("--trace", crop.trace, "Search trace JSONL path");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Evaluate cropping methods on a benchmark");
  add_method_flags(b, bench);
  b->add_option("--method", bench.methods, "Methods to evaluate, repeatable");
  b->add_option("--overlay-dir", bench.overlay_dir, "Write one overlay PNG per item");

  BenchArgs sw;
  std::string sweep_param, sweep_values, sweep_method = "heatmap";
  auto* s = app.add_subcommand("sweep", "Evaluate one method over a parameter grid");
  add_method_flags(s, sw);
  s->add_option("--method", sweep_method, "Method to sweep");
  s->add_option("--param", sweep_param, "iterations, k_range, alpha or step_granularity")->required();
  s->add_option("--values", sweep_values, "Comma-separated values, e.g. 10,100,500 or 14-20,14-28")->required();

  std::string ds_annotations, ds_out;
  auto* d = app.add_subcommand("dataset", "Build benchmark tuples from annotations");
  d->add_option("--annotations", ds_annotations, "Annotation JSONL")->required()->check(CLI::ExistingFile);
  d->add_option("--out", ds_out, "Output JSONL (default stdout)");

  cc::ServerOptions serve;
  std::string static_dir;
  auto* sv = app.add_subcommand("serve", "Run the HTTP service");
  sv->add_option("--host", serve.host, "Bind address");
  sv->add_option("--port", serve.port, "Port (0 picks a free one)");
  sv->add_option("--static-dir", static_dir, "Static files served at /")->check(CLI::ExistingDirectory);
  sv->add_option("--max-upload", serve.max_upload_bytes, "Upload cap in bytes");

  std::string hm_image, hm_out, hm_size = "64x64";
  auto* h = app.add_subcommand("heatmap", "Heuristic saliency heatmap of an image");
  h->add_option("--image", hm_image, "Input image")->required()->check(CLI::ExistingFile);
  h->add_option("--out", hm_out, "Output .png, .pgm or .csv")->required();
  h->add_option("--size", hm_size, "Grid size WxH");

  std::string pr_aspect, pr_size, pr_out;
  int pr_kstart = cc::kDefaultKStart, pr_kend = cc::kDefaultKEnd;
  auto* p = app.add_subcommand("proposals", "List sliding-window proposals");
  p->add_option("--size", pr_size, "Image size WxH")->required();
  p->add_option("--aspect", pr_aspect, "W:H or decimal")->required();
  p->add_option("--kstart", pr_kstart, "First scale");
  p->add_option("--kend", pr_kend, "Last scale");
  p->add_option("--out", pr_out, "Output JSONL (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadArgs;
  }

  try {
    if (*c) return run_crop_cmd(crop);
    if (*b) return run_bench_cmd(bench);
    if (*s) {
      sw.config.method = sweep_method;
      sw.config.optimizer.strategy = cc::strategy_from_string(sw.strategy);
      if (!cc::is_known_method(sweep_method)) {
        throw cc::Error(cc::ErrorKind::InvalidArgument, "unknown method '" + sweep_method + "'");
      }
      const auto param = cc::sweep_param_from_string(sweep_param);
      const auto rows = cc::sweep(param, split_csv(sweep_values), sw.config, cc::load_benchmark(sw.benchmark),
                                  provider_for(sw), sw.seed);
      std::cout << cc::format_sweep_table(param, rows);
      if (!sw.out.empty()) {
        std::ostringstream os;
        cc::write_sweep_csv(os, param, rows);
        write_text(sw.out, os.str());
      }
      return 0;
    }
    if (*d) return run_dataset_cmd(ds_annotations, ds_out);
    if (*sv) {
      serve.static_dir = static_dir;
      cc::CropServer server(serve);
      const int port = server.bind();
      if (port < 0) throw cc::Error(cc::ErrorKind::Io, "cannot bind " + serve.host + ":" + std::to_string(serve.port));
      std::cerr << "listening on http://" << serve.host << ":" << port << "\n";
      return server.listen_after_bind() ? 0 : kExitIo;
    }
    if (*h) {
      cc::save_heatmap(hm_out, cc::heuristic_saliency(cc::load_image(hm_image), parse_dims(hm_size)));
      return 0;
    }
    if (*p) {
      const auto set = cc::generate_proposals(parse_dims(pr_size), cc::AspectRatio::parse(pr_aspect), pr_kstart, pr_kend);
      std::ostringstream os;
      cc::write_proposals_jsonl(os, set);
      write_text(pr_out, os.str());
      std::cerr << set.boxes.size() << " proposals\n";
      return 0;
    }
  } catch (const cc::Error& e) {
    std::cerr << "condcrop: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "condcrop: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitBadArgs;
}
