#include "condcrop/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "condcrop/error.hpp"
#include "condcrop/json_io.hpp"

namespace condcrop {
namespace {

constexpr int kMaxResample = 64;

// anneal
constexpr double kStartRadiusFraction = 0.25;
constexpr double kEndRadius = 0.5;
constexpr double kExploreProbability = 0.05;
constexpr double kResizeProbability = 0.3;

// tpe-lite
constexpr double kGoodFraction = 0.25;
constexpr int kTpeCandidates = 24;
constexpr double kMinBandwidth = 0.01;

class RandomSampler final : public Sampler {
 public:
  explicit RandomSampler(const SearchSpace& space) : space_(space) {}
  SearchPoint next(Rng& rng) override { return space_.random_point(rng); }
  void observe(const SearchPoint&, double) override {}

 private:
  const SearchSpace& space_;
};

// Gaussian perturbation of the incumbent with a geometrically shrinking radius.
class AnnealSampler final : public Sampler {
 public:
  AnnealSampler(const SearchSpace& space, const OptimizerConfig& config)
      : space_(space),
        initial_(std::min(config.initial_samples, config.iterations)),
        budget_(config.iterations),
        start_radius_(kStartRadiusFraction * std::max(space.dims().width, space.dims().height)),
        end_radius_(std::min(kEndRadius, start_radius_)) {}

  SearchPoint next(Rng& rng) override {
    if (seen_ < initial_ || !has_incumbent_ || rng.unit() < kExploreProbability) return space_.random_point(rng);
    const double radius = anneal_radius(seen_ - initial_, budget_ - initial_, start_radius_, end_radius_);
    const double step_radius = std::max(radius, space_.granularity());
    if (rng.unit() < kResizeProbability) return resize(rng, step_radius);
    bool move[3] = {false, false, false};
    while (!(move[0] || move[1] || move[2])) {
      for (bool& m : move) m = rng.unit() < 0.5;
    }
    const double x = incumbent_.position_x + (move[0] ? radius * rng.normal() : 0.0);
    const double y = incumbent_.position_y + (move[1] ? radius * rng.normal() : 0.0);
    const double s = incumbent_.step + (move[2] ? step_radius * rng.normal() : 0.0);
    const int nx = std::clamp(round_half_away(x), 0, space_.dims().width - 1);
    const int ny = std::clamp(round_half_away(y), 0, space_.dims().height - 1);
    const bool from = height_free(incumbent_.position_x, incumbent_.position_y);
    return space_.clamp(nx, ny, rebranch(s, from, height_free(nx, ny)));
  }

  bool height_free(int x, int y) const {
    const Dims& d = space_.dims();
    return static_cast<double>(d.width - x) / (d.height - y) <= space_.omega().value();
  }

  // The step is a height on one side of the margin-ratio boundary and a width
  // on the other; keep the box size when a move crosses it.
  double rebranch(double step, bool from_height, bool to_height) const {
    if (from_height == to_height) return step;
    return from_height ? step * space_.omega().value() : step / space_.omega().value();
  }

  // Changes the step while holding one corner or the center of the incumbent
  // box fixed, so boxes pinned against the frame edges can grow or shrink.
  SearchPoint resize(Rng& rng, double step_radius) const {
    const CropBox b = space_.to_box(incumbent_);
    double ds = step_radius * rng.normal();
    if (std::abs(ds) < space_.granularity()) ds = ds < 0.0 ? -space_.granularity() : space_.granularity();
    const double step = std::max(1.0, incumbent_.step + ds);
    // Predict the integer size the conversion will give, with the free side
    // chosen as at the incumbent.
    const double omega = space_.omega().value();
    const bool from = height_free(incumbent_.position_x, incumbent_.position_y);
    const int side = round_half_away(step);
    const double w = from ? round_half_away(side * omega) : side;
    const double h = from ? side : round_half_away(side / omega);
    double x = b.x, y = b.y;
    switch (rng.uniform_int(0, 4)) {
      case 0: break;
      case 1: x = b.right() - w; break;
      case 2: y = b.bottom() - h; break;
      case 3: x = b.right() - w; y = b.bottom() - h; break;
      default: x = b.x + 0.5 * (b.width - w); y = b.y + 0.5 * (b.height - h); break;
    }
    const int nx = std::clamp(round_half_away(x), 0, space_.dims().width - 1);
    const int ny = std::clamp(round_half_away(y), 0, space_.dims().height - 1);
    return space_.clamp(nx, ny, height_free(nx, ny) ? h : w);
  }

  void observe(const SearchPoint& point, double total) override {
    ++seen_;
    if (!has_incumbent_ || total > best_) {
      incumbent_ = point;
      best_ = total;
      has_incumbent_ = true;
    }
  }

 private:
  const SearchSpace& space_;
  int initial_;
  int budget_;
  double start_radius_;
  double end_radius_;
  int seen_ = 0;
  bool has_incumbent_ = false;
  SearchPoint incumbent_;
  double best_ = 0.0;
};

// Tree-structured-Parzen-style sampler: observations are split into the top
// quarter and the rest; candidates drawn around good points are ranked by the
// ratio of good to bad kernel densities.
class TpeLiteSampler final : public Sampler {
 public:
  TpeLiteSampler(const SearchSpace& space, const OptimizerConfig& config)
      : space_(space), initial_(std::max(2, std::min(config.initial_samples, config.iterations))) {
    scale_ = std::max(space.dims().width, space.dims().height);
  }

  SearchPoint next(Rng& rng) override {
    if (static_cast<int>(obs_.size()) < initial_) return space_.random_point(rng);

    std::vector<std::size_t> order(obs_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return obs_[a].total > obs_[b].total; });
    const std::size_t n_good = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kGoodFraction * obs_.size())));
    std::vector<Vec> good;
    std::vector<Vec> bad;
    for (std::size_t i = 0; i < order.size(); ++i) (i < n_good ? good : bad).push_back(obs_[order[i]].v);
    const Vec bw_good = bandwidth(good);
    const Vec bw_bad = bandwidth(bad);

    SearchPoint best_point;
    double best_ratio = -1.0;
    for (int c = 0; c < kTpeCandidates; ++c) {
      const Vec& center = good[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(good.size()) - 1))];
      Vec v;
      for (int d = 0; d < 3; ++d) v[d] = center[d] + bw_good[d] * rng.normal();
      const SearchPoint p = space_.clamp(v[0] * scale_, v[1] * scale_, v[2] * scale_);
      const Vec q = to_vec(p);
      const double ratio = density(q, good, bw_good) / (density(q, bad, bw_bad) + 1e-300);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_point = p;
      }
    }
    return best_point;
  }

  void observe(const SearchPoint& point, double total) override { obs_.push_back({to_vec(point), total}); }

 private:
  using Vec = std::array<double, 3>;
  struct Obs {
    Vec v;
    double total;
  };

  Vec to_vec(const SearchPoint& p) const {
    return {p.position_x / scale_, p.position_y / scale_, p.step / scale_};
  }

  static Vec bandwidth(const std::vector<Vec>& pts) {
    Vec bw{kMinBandwidth, kMinBandwidth, kMinBandwidth};
    if (pts.size() < 2) return {0.1, 0.1, 0.1};
    const double n = static_cast<double>(pts.size());
    for (int d = 0; d < 3; ++d) {
      double mean = 0.0;
      for (const auto& p : pts) mean += p[d];
      mean /= n;
      double var = 0.0;
      for (const auto& p : pts) var += (p[d] - mean) * (p[d] - mean);
      const double sd = std::sqrt(var / (n - 1.0));
      bw[d] = std::max(kMinBandwidth, sd * std::pow(n, -0.2));
    }
    return bw;
  }

  static double density(const Vec& q, const std::vector<Vec>& pts, const Vec& bw) {
    if (pts.empty()) return 1.0;
    double acc = 0.0;
    for (const auto& p : pts) {
      double e = 0.0;
      for (int d = 0; d < 3; ++d) {
        const double z = (q[d] - p[d]) / bw[d];
        e += z * z;
      }
      acc += std::exp(-0.5 * e);
    }
    return acc / (static_cast<double>(pts.size()) * bw[0] * bw[1] * bw[2]);
  }

  const SearchSpace& space_;
  int initial_;
  double scale_ = 1.0;
  std::vector<Obs> obs_;
};

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Random: return "random";
    case Strategy::Anneal: return "anneal";
    case Strategy::TpeLite: return "tpe-lite";
  }
  return "anneal";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "random") return Strategy::Random;
  if (name == "anneal") return Strategy::Anneal;
  if (name == "tpe-lite" || name == "tpe") return Strategy::TpeLite;
  throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "iterations must be >= 1");
  if (!(step_granularity >= 1.0) || !std::isfinite(step_granularity)) {
    throw Error(ErrorKind::InvalidArgument, "step granularity must be >= 1");
  }
  if (initial_samples < 1) throw Error(ErrorKind::InvalidArgument, "initial samples must be >= 1");
}

SearchSpace::SearchSpace(Dims dims, AspectRatio omega, double step_granularity)
    : dims_(dims), omega_(omega), granularity_(step_granularity) {
  if (!dims.valid()) throw Error(ErrorKind::InvalidArgument, "image dims must be positive");
  const Dims smallest = minimal_box(omega);
  if (smallest.width > dims.width || smallest.height > dims.height) {
    throw Error(ErrorKind::InfeasibleSearchSpace, "no box of ratio " + std::to_string(omega.value()) + " fits " +
                                                      std::to_string(dims.width) + "x" + std::to_string(dims.height));
  }
  max_x_ = dims.width - smallest.width;
  max_y_ = dims.height - smallest.height;
}

double SearchSpace::step_upper(int x, int y) const { return step_max(x, y, dims_, omega_); }

double SearchSpace::step_lower(int x, int y) const {
  const double margin_x = dims_.width - x;
  const double margin_y = dims_.height - y;
  const double w = omega_.value();
  if (margin_x / margin_y <= w) return std::max(1.0, std::ceil(0.5 / w));
  return std::max(1.0, std::ceil(0.5 * w));
}

double SearchSpace::snap_step(double step, int x, int y) const {
  const double hi = step_upper(x, y);
  const double lo = step_lower(x, y);
  double s = granularity_ * std::round(step / granularity_);
  s = std::max(s, granularity_);
  return std::max(std::min(s, hi), std::min(lo, hi));
}

SearchPoint SearchSpace::random_point(Rng& rng) const {
  for (int attempt = 0; attempt < kMaxResample; ++attempt) {
    SearchPoint p;
    p.position_x = rng.uniform_int(0, max_x_);
    p.position_y = rng.uniform_int(0, max_y_);
    const double hi = step_upper(p.position_x, p.position_y);
    const double raw = rng.unit_open_low() * hi;
    p.step = std::max(std::min(hi, granularity_ * std::ceil(raw / granularity_)), std::min(step_lower(p.position_x, p.position_y), hi));
    try {
      to_box(p);
      return p;
    } catch (const Error&) {
      p.step = hi;
      try {
        to_box(p);
        return p;
      } catch (const Error&) {
      }
    }
  }
  throw Error(ErrorKind::InfeasibleSearchSpace, "could not sample a feasible search point");
}

SearchPoint SearchSpace::clamp(double x, double y, double step) const {
  SearchPoint p;
  p.position_x = std::clamp(round_half_away(std::clamp(x, -1e9, 1e9)), 0, max_x_);
  p.position_y = std::clamp(round_half_away(std::clamp(y, -1e9, 1e9)), 0, max_y_);
  p.step = snap_step(step, p.position_x, p.position_y);
  return p;
}

std::unique_ptr<Sampler> make_sampler(const SearchSpace& space, const OptimizerConfig& config) {
  switch (config.strategy) {
    case Strategy::Random: return std::make_unique<RandomSampler>(space);
    case Strategy::Anneal: return std::make_unique<AnnealSampler>(space, config);
    case Strategy::TpeLite: return std::make_unique<TpeLiteSampler>(space, config);
  }
  return std::make_unique<RandomSampler>(space);
}

double anneal_radius(int t, int n, double start, double end) {
  if (n <= 1) return end;
  const double frac = std::clamp(static_cast<double>(t) / (n - 1), 0.0, 1.0);
  return start * std::pow(end / start, frac);
}

OptimizeResult optimize(const CandidateScorer& score, const Dims& dims, AspectRatio omega,
                        const OptimizerConfig& config) {
  config.validate();
  const SearchSpace space(dims, omega, config.step_granularity);
  auto sampler = make_sampler(space, config);
  Rng rng(config.seed);

  OptimizeResult result;
  result.trace.evaluations.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    SearchPoint p = sampler->next(rng);
    CropBox box;
    try {
      box = space.to_box(p);
    } catch (const Error&) {
      p = space.random_point(rng);
      box = space.to_box(p);
    }
    const ScoreBreakdown s = score(box);
    sampler->observe(p, s.total);
    result.trace.evaluations.push_back(TraceEntry{it, p, box, s.total});
    if (it == 0 || s.total > result.breakdown.total) {
      result.trace.best_index = static_cast<std::size_t>(it);
      result.box = box;
      result.breakdown = s;
    }
  }
  return result;
}

void write_trace_jsonl(std::ostream& out, const SearchTrace& trace) {
  for (const auto& e : trace.evaluations) {
    ordered_json j;
    j["iteration"] = e.iteration;
    j["point"] = ordered_json{{"position_x", e.point.position_x}, {"position_y", e.point.position_y}, {"step", e.point.step}};
    j["box"] = box_to_json(e.box);
    j["total"] = e.total;
    out << j.dump() << '\n';
  }
}

}  // namespace condcrop
