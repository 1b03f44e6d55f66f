#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "condcrop/dataset.hpp"
#include "condcrop/heatmaps.hpp"
#include "condcrop/image_io.hpp"
#include "condcrop/optimizer.hpp"
#include "condcrop/proposals.hpp"
#include "condcrop/scoring.hpp"

namespace condcrop {

struct CropContext {
  const BenchmarkTuple& item;
  const Heatmap& heatmap;
  std::uint64_t seed = 0;
};

struct CropOutcome {
  CropBox box;
  std::size_t candidates = 0;  // boxes scored to reach the answer
};

/// Cropping contract evaluated by the harness.
using CropMethod = std::function<CropOutcome(const CropContext&)>;

/// Returns the heatmap for an image id, or null when it has none.
using HeatmapProvider = std::function<std::shared_ptr<const Heatmap>(const std::string& image_id)>;

HeatmapProvider pseudo_heatmap_provider(const std::vector<AnnotationRecord>& records,
                                        Dims out_dims = kDefaultHeatmapDims);
/// Looks for <dir>/<image_id>.png, .pgm or .csv.
HeatmapProvider directory_provider(const std::filesystem::path& dir);

/// Method names: oracle, full_frame, random_box, heatmap, proposal,
/// baseline_short, baseline_long.
struct MethodConfig {
  std::string method = "heatmap";
  OptimizerConfig optimizer;
  int k_start = kDefaultKStart;
  int k_end = kDefaultKEnd;
  ScoreWeights weights;
  unsigned threads = 1;
};

CropMethod make_method(const MethodConfig& config);
bool is_known_method(std::string_view name);

struct ItemResult {
  std::string id;
  CropBox box;
  double iou = 0.0;
  double recall = 0.0;
  double elapsed_s = 0.0;
  std::size_t candidates = 0;
};

struct EvalReport {
  std::string method_id;
  double mean_iou = 0.0;
  double mean_recall = 0.0;
  double mean_elapsed = 0.0;
  double mean_candidates = 0.0;
  std::vector<ItemResult> per_item;

  /// Recomputes the aggregates from per_item and compares (1e-12).
  bool consistent() const;
};

/// Runs `method` on every tuple; per-item seed derives from `seed` and the
/// item index. Only the crop call is timed. Throws MissingHeatmap.
EvalReport evaluate(const std::string& method_id, const CropMethod& method, const std::vector<BenchmarkTuple>& tuples,
                    const HeatmapProvider& provider, std::uint64_t seed = 0);

/// "id,iou,recall,elapsed_s" rows followed by a "# ..." summary footer.
void write_report_csv(std::ostream& out, const EvalReport& report);
std::string format_report_table(const std::vector<EvalReport>& reports);

enum class SweepParam { Iterations, KRange, Alpha, StepGranularity };

SweepParam sweep_param_from_string(std::string_view name);
std::string_view to_string(SweepParam p);

struct SweepRow {
  std::string value;
  EvalReport report;
};

/// Applies a sweep value ("14-28" style for k_range) to a method config.
MethodConfig apply_sweep_value(MethodConfig config, SweepParam param, const std::string& value);

std::vector<SweepRow> sweep(SweepParam param, const std::vector<std::string>& values, const MethodConfig& fixed,
                            const std::vector<BenchmarkTuple>& tuples, const HeatmapProvider& provider,
                            std::uint64_t seed = 0);

void write_sweep_csv(std::ostream& out, SweepParam param, const std::vector<SweepRow>& rows);
std::string format_sweep_table(SweepParam param, const std::vector<SweepRow>& rows);

/// Nearest-neighbour upscale of a heatmap to image size, as RGB.
PixelImage heatmap_backdrop(const Heatmap& heatmap, const Dims& image_dims);

/// Draws ground truth (blue), layout regions (red) and prediction (green).
PixelImage render_overlay(const PixelImage& background, const std::optional<CropBox>& gt,
                          const std::vector<CropBox>& layout, const CropBox& prediction);

}  // namespace condcrop
