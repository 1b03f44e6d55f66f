#include "condcrop/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "condcrop/error.hpp"
#include "condcrop/json_io.hpp"

namespace condcrop {
namespace {

constexpr int kMaxBase = 64;
constexpr double kTieEps = 1e-12;

int scale_to_minimum(int a, int b) {
  const int smaller = std::min(a, b);
  return (kMinBaseStep + smaller - 1) / smaller;
}

}  // namespace

StepPair get_step_size(AspectRatio omega) {
  const double w = omega.value();
  StepPair best{};
  double best_err = std::numeric_limits<double>::infinity();
  // Search the base side along the shorter axis so extreme ratios still find
  // an exact small pair before scaling.
  for (int base = 1; base <= kMaxBase; ++base) {
    int base_h = base;
    int base_w = std::max(1, round_half_away(base * w));
    if (w < 1.0) {
      base_w = base;
      base_h = std::max(1, round_half_away(base / w));
    }
    const double err = std::abs(static_cast<double>(base_w) / base_h - w);
    const int m = scale_to_minimum(base_h, base_w);
    const StepPair cand{base_h * m, base_w * m};
    if (err < best_err - kTieEps || (std::abs(err - best_err) <= kTieEps && cand.step_h < best.step_h)) {
      best = cand;
      best_err = err;
    }
  }
  return best;
}

ProposalSet generate_proposals(const Dims& dims, AspectRatio omega, int k_start, int k_end) {
  if (k_start < 1 || k_end < k_start) {
    throw Error(ErrorKind::InvalidArgument, "need 1 <= k_start <= k_end");
  }
  if (!dims.valid()) throw Error(ErrorKind::InvalidArgument, "image dims must be positive");

  ProposalSet set;
  set.omega = omega;
  set.k_start = k_start;
  set.k_end = k_end;
  set.dims = dims;
  set.steps = get_step_size(omega);
  const int doubling = omega.is_extreme() ? 2 : 1;
  set.offset_h = set.steps.step_h * doubling;
  set.offset_w = set.steps.step_w * doubling;

  for (int k = k_start; k <= k_end; ++k) {
    const std::int64_t box_h = std::int64_t{k} * set.steps.step_h;
    const std::int64_t box_w = std::int64_t{k} * set.steps.step_w;
    if (box_h > dims.height || box_w > dims.width) continue;
    for (std::int64_t y = 0; y + box_h <= dims.height; y += set.offset_h) {
      for (std::int64_t x = 0; x + box_w <= dims.width; x += set.offset_w) {
        set.boxes.push_back(
            CropBox{static_cast<int>(x), static_cast<int>(y), static_cast<int>(box_w), static_cast<int>(box_h)});
      }
    }
  }
  if (set.boxes.empty()) {
    throw Error(ErrorKind::EmptyProposalSet, "no " + std::to_string(k_start * set.steps.step_w) + "x" +
                                                 std::to_string(k_start * set.steps.step_h) + " proposal fits " +
                                                 std::to_string(dims.width) + "x" + std::to_string(dims.height));
  }
  return set;
}

SearchResult exhaustive_search(const CandidateScorer& score, const ProposalSet& set, unsigned threads) {
  const auto& boxes = set.boxes;
  if (boxes.empty()) throw Error(ErrorKind::EmptyProposalSet, "nothing to search");

  auto scan = [&](std::size_t begin, std::size_t end) {
    SearchResult best{boxes[begin], score(boxes[begin]), begin};
    for (std::size_t i = begin + 1; i < end; ++i) {
      auto s = score(boxes[i]);
      if (s.total > best.breakdown.total) best = SearchResult{boxes[i], s, i};
    }
    return best;
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(boxes.size())));
  if (threads == 1) return scan(0, boxes.size());

  std::vector<std::future<SearchResult>> parts;
  const std::size_t chunk = (boxes.size() + threads - 1) / threads;
  for (std::size_t begin = 0; begin < boxes.size(); begin += chunk) {
    parts.push_back(std::async(std::launch::async, scan, begin, std::min(boxes.size(), begin + chunk)));
  }
  SearchResult best = parts.front().get();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    auto r = parts[i].get();
    if (r.breakdown.total > best.breakdown.total) best = r;
  }
  return best;
}

void write_proposals_jsonl(std::ostream& out, const ProposalSet& set) {
  for (const auto& box : set.boxes) out << box_to_json(box).dump() << '\n';
}

}  // namespace condcrop
