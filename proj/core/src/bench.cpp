#include "condcrop/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "condcrop/baselines.hpp"
#include "condcrop/error.hpp"
#include "condcrop/random.hpp"

namespace condcrop {
namespace {

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;

class CachedProvider {
 public:
  using Loader = std::function<std::shared_ptr<const Heatmap>(const std::string&)>;
  explicit CachedProvider(Loader loader) : loader_(std::move(loader)) {}

  std::shared_ptr<const Heatmap> get(const std::string& id) {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
    auto h = loader_(id);
    cache_.emplace(id, h);
    return h;
  }

 private:
  Loader loader_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Heatmap>> cache_;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

CropOutcome run_heatmap_method(const MethodConfig& cfg, const CropContext& ctx) {
  const HeatmapScorer scorer(ctx.heatmap, LayoutConstraint::single(ctx.item.layout), cfg.weights, ctx.item.dims);
  OptimizerConfig opt = cfg.optimizer;
  opt.seed = ctx.seed;
  const auto result = optimize(scorer.as_function(), ctx.item.dims, ctx.item.omega(), opt);
  return {result.box, result.trace.evaluations.size()};
}

CropOutcome run_proposal_method(const MethodConfig& cfg, const CropContext& ctx) {
  const HeatmapScorer scorer(ctx.heatmap, LayoutConstraint::single(ctx.item.layout), cfg.weights, ctx.item.dims);
  const auto set = generate_proposals(ctx.item.dims, ctx.item.omega(), cfg.k_start, cfg.k_end);
  const auto best = exhaustive_search(scorer.as_function(), set, cfg.threads);
  return {best.box, set.boxes.size()};
}

}  // namespace

HeatmapProvider pseudo_heatmap_provider(const std::vector<AnnotationRecord>& records, Dims out_dims) {
  auto by_id = std::make_shared<std::map<std::string, AnnotationRecord>>();
  for (const auto& r : records) by_id->emplace(r.image_id, r);
  auto cache = std::make_shared<CachedProvider>([by_id, out_dims](const std::string& id) -> std::shared_ptr<const Heatmap> {
    auto it = by_id->find(id);
    if (it == by_id->end()) return nullptr;
    return std::make_shared<const Heatmap>(pseudo_heatmap(it->second, out_dims));
  });
  return [cache](const std::string& id) { return cache->get(id); };
}

HeatmapProvider directory_provider(const std::filesystem::path& dir) {
  auto cache = std::make_shared<CachedProvider>([dir](const std::string& id) -> std::shared_ptr<const Heatmap> {
    for (const char* ext : {".png", ".pgm", ".csv"}) {
      const auto path = dir / (id + ext);
      if (std::filesystem::exists(path)) return std::make_shared<const Heatmap>(load_heatmap(path));
    }
    return nullptr;
  });
  return [cache](const std::string& id) { return cache->get(id); };
}

bool is_known_method(std::string_view name) {
  for (const char* m : {"oracle", "full_frame", "random_box", "heatmap", "proposal", "baseline_short", "baseline_long"}) {
    if (name == m) return true;
  }
  return false;
}

CropMethod make_method(const MethodConfig& config) {
  const std::string& m = config.method;
  if (m == "oracle") return [](const CropContext& ctx) { return CropOutcome{ctx.item.gt_box, 0}; };
  if (m == "full_frame") {
    return [](const CropContext& ctx) { return CropOutcome{CropBox{0, 0, ctx.item.dims.width, ctx.item.dims.height}, 0}; };
  }
  if (m == "random_box") {
    return [](const CropContext& ctx) {
      const SearchSpace space(ctx.item.dims, ctx.item.omega());
      Rng rng(ctx.seed);
      return CropOutcome{space.to_box(space.random_point(rng)), 1};
    };
  }
  if (m == "heatmap") return [config](const CropContext& ctx) { return run_heatmap_method(config, ctx); };
  if (m == "proposal") return [config](const CropContext& ctx) { return run_proposal_method(config, ctx); };
  if (m == "baseline_short" || m == "baseline_long") {
    const EdgeMode mode = m == "baseline_short" ? EdgeMode::Short : EdgeMode::Long;
    return [mode](const CropContext& ctx) {
      return CropOutcome{
          baseline_crop(ctx.heatmap, LayoutConstraint::single(ctx.item.layout), ctx.item.omega(), mode, ctx.item.dims), 0};
    };
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + m + "'");
}

bool EvalReport::consistent() const {
  if (per_item.empty()) return mean_iou == 0.0;
  double iou_sum = 0.0;
  for (const auto& r : per_item) iou_sum += r.iou;
  return std::abs(iou_sum / static_cast<double>(per_item.size()) - mean_iou) <= 1e-12;
}

EvalReport evaluate(const std::string& method_id, const CropMethod& method, const std::vector<BenchmarkTuple>& tuples,
                    const HeatmapProvider& provider, std::uint64_t seed) {
  if (tuples.empty()) throw Error(ErrorKind::InvalidArgument, "benchmark is empty");
  EvalReport report;
  report.method_id = method_id;
  report.per_item.reserve(tuples.size());
  double iou_sum = 0.0, recall_sum = 0.0, time_sum = 0.0, cand_sum = 0.0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    const auto heatmap = provider(t.image_id);
    if (!heatmap) throw Error(ErrorKind::MissingHeatmap, "no heatmap for image '" + t.image_id + "'");

    const CropContext ctx{t, *heatmap, seed + kSeedStride * i};
    const auto start = std::chrono::steady_clock::now();
    const CropOutcome out = method(ctx);
    const auto stop = std::chrono::steady_clock::now();

    ItemResult r;
    r.id = t.image_id + "/" + std::to_string(i);
    r.box = out.box;
    r.iou = iou(out.box, t.gt_box);
    r.recall = v_layout(LayoutConstraint::single(t.layout), out.box);
    r.elapsed_s = std::chrono::duration<double>(stop - start).count();
    r.candidates = out.candidates;
    iou_sum += r.iou;
    recall_sum += r.recall;
    time_sum += r.elapsed_s;
    cand_sum += static_cast<double>(r.candidates);
    report.per_item.push_back(std::move(r));
  }
  const double n = static_cast<double>(tuples.size());
  report.mean_iou = iou_sum / n;
  report.mean_recall = recall_sum / n;
  report.mean_elapsed = time_sum / n;
  report.mean_candidates = cand_sum / n;
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "id,iou,recall,elapsed_s\n";
  for (const auto& r : report.per_item) {
    out << r.id << ',' << fmt("%.6f", r.iou) << ',' << fmt("%.6f", r.recall) << ',' << fmt("%.6f", r.elapsed_s) << '\n';
  }
  out << "# method=" << report.method_id << ",n=" << report.per_item.size() << ",mean_iou=" << fmt("%.6f", report.mean_iou)
      << ",mean_recall=" << fmt("%.6f", report.mean_recall) << ",mean_elapsed_s=" << fmt("%.6f", report.mean_elapsed)
      << '\n';
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %8s %8s %10s\n", "Methods", "IoU", "recall", "time[s]");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-18s %8.4f %8.4f %10.4f\n", r.method_id.c_str(), r.mean_iou, r.mean_recall,
                  r.mean_elapsed);
    os << line;
  }
  return os.str();
}

SweepParam sweep_param_from_string(std::string_view name) {
  if (name == "iterations") return SweepParam::Iterations;
  if (name == "k_range") return SweepParam::KRange;
  if (name == "alpha") return SweepParam::Alpha;
  if (name == "step_granularity") return SweepParam::StepGranularity;
  throw Error(ErrorKind::InvalidArgument, "unknown sweep parameter '" + std::string(name) + "'");
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Iterations: return "iterations";
    case SweepParam::KRange: return "k_range";
    case SweepParam::Alpha: return "alpha";
    case SweepParam::StepGranularity: return "step_granularity";
  }
  return "iterations";
}

MethodConfig apply_sweep_value(MethodConfig config, SweepParam param, const std::string& value) {
  try {
    switch (param) {
      case SweepParam::Iterations: config.optimizer.iterations = std::stoi(value); break;
      case SweepParam::Alpha: config.weights.alpha = std::stod(value); break;
      case SweepParam::StepGranularity: config.optimizer.step_granularity = std::stod(value); break;
      case SweepParam::KRange: {
        const auto dash = value.find('-');
        if (dash == std::string::npos) throw std::invalid_argument("k_range needs START-END");
        config.k_start = std::stoi(value.substr(0, dash));
        config.k_end = std::stoi(value.substr(dash + 1));
        break;
      }
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "bad " + std::string(to_string(param)) + " value '" + value + "'");
  }
  return config;
}

std::vector<SweepRow> sweep(SweepParam param, const std::vector<std::string>& values, const MethodConfig& fixed,
                            const std::vector<BenchmarkTuple>& tuples, const HeatmapProvider& provider,
                            std::uint64_t seed) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (const auto& v : values) {
    const MethodConfig cfg = apply_sweep_value(fixed, param, v);
    rows.push_back(SweepRow{v, evaluate(cfg.method, make_method(cfg), tuples, provider, seed)});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepParam param, const std::vector<SweepRow>& rows) {
  out << to_string(param) << ",mean_iou,mean_recall,mean_elapsed_s,mean_candidates\n";
  for (const auto& r : rows) {
    out << r.value << ',' << fmt("%.6f", r.report.mean_iou) << ',' << fmt("%.6f", r.report.mean_recall) << ','
        << fmt("%.6f", r.report.mean_elapsed) << ',' << fmt("%.2f", r.report.mean_candidates) << '\n';
  }
}

std::string format_sweep_table(SweepParam param, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %12s %8s %8s %10s\n", std::string(to_string(param)).c_str(), "# candidates",
                "IoU", "recall", "time[s]");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-18s %12.2f %8.4f %8.4f %10.4f\n", r.value.c_str(), r.report.mean_candidates,
                  r.report.mean_iou, r.report.mean_recall, r.report.mean_elapsed);
    os << line;
  }
  return os.str();
}

PixelImage heatmap_backdrop(const Heatmap& heatmap, const Dims& image_dims) {
  PixelImage out(image_dims, 3);
  const Dims hd = heatmap.dims();
  for (int y = 0; y < image_dims.height; ++y) {
    const int hy = std::min(hd.height - 1, static_cast<int>(static_cast<std::int64_t>(y) * hd.height / image_dims.height));
    for (int x = 0; x < image_dims.width; ++x) {
      const int hx = std::min(hd.width - 1, static_cast<int>(static_cast<std::int64_t>(x) * hd.width / image_dims.width));
      const auto v = static_cast<std::uint8_t>(std::lround(heatmap.at(hx, hy) * 255.0));
      out.at(x, y, 0) = out.at(x, y, 1) = out.at(x, y, 2) = v;
    }
  }
  return out;
}

PixelImage render_overlay(const PixelImage& background, const std::optional<CropBox>& gt,
                          const std::vector<CropBox>& layout, const CropBox& prediction) {
  PixelImage out = to_rgb(background);
  if (gt) draw_box(out, *gt, Rgb{0, 0, 255});
  for (const auto& l : layout) draw_box(out, l, Rgb{255, 0, 0});
  draw_box(out, prediction, Rgb{0, 255, 0});
  return out;
}

}  // namespace condcrop
