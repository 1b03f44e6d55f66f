#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "condcrop/geometry.hpp"
#include "condcrop/random.hpp"
#include "condcrop/scoring.hpp"

namespace condcrop {

enum class Strategy { Random, Anneal, TpeLite };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

struct OptimizerConfig {
  int iterations = 100;
  Strategy strategy = Strategy::Anneal;
  double step_granularity = 32.0;
  std::uint64_t seed = 0;
  int initial_samples = 16;

  void validate() const;
};

struct TraceEntry {
  int iteration = 0;
  SearchPoint point;
  CropBox box;
  double total = 0.0;
};

struct SearchTrace {
  std::vector<TraceEntry> evaluations;
  std::size_t best_index = 0;
};

struct OptimizeResult {
  CropBox box;
  ScoreBreakdown breakdown;
  SearchTrace trace;
};

/// Feasible (position, step) region for a frame and ratio.
class SearchSpace {
 public:
  /// Throws InfeasibleSearchSpace when no box of ratio omega fits dims.
  SearchSpace(Dims dims, AspectRatio omega, double step_granularity = 1.0);

  const Dims& dims() const { return dims_; }
  AspectRatio omega() const { return omega_; }
  int max_x() const { return max_x_; }
  int max_y() const { return max_y_; }
  double granularity() const { return granularity_; }

  double step_upper(int x, int y) const;
  double step_lower(int x, int y) const;

  /// Snaps a step to a multiple of the granularity and into the valid range at (x, y).
  double snap_step(double step, int x, int y) const;

  /// Uniform position, step uniform over (0, step_max] rounded up to the granularity.
  SearchPoint random_point(Rng& rng) const;

  /// Clamps a perturbed point back into the feasible region.
  SearchPoint clamp(double x, double y, double step) const;

  CropBox to_box(const SearchPoint& p) const { return convert_step(p, dims_, omega_); }

 private:
  Dims dims_;
  AspectRatio omega_;
  double granularity_;
  int max_x_ = 0;
  int max_y_ = 0;
};

/// Per-call strategy state. next() proposes, observe() feeds back the score.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual SearchPoint next(Rng& rng) = 0;
  virtual void observe(const SearchPoint& point, double total) = 0;
};

std::unique_ptr<Sampler> make_sampler(const SearchSpace& space, const OptimizerConfig& config);

/// Perturbation radius of the anneal strategy at iteration t of n (geometric
/// decay from start to end).
double anneal_radius(int t, int n, double start, double end);

/// Black-box maximization of the scorer over boxes of ratio omega. Exactly
/// config.iterations candidates are evaluated; deterministic per seed.
OptimizeResult optimize(const CandidateScorer& score, const Dims& dims, AspectRatio omega,
                        const OptimizerConfig& config);

/// One {"iteration","point","box","total"} object per line.
void write_trace_jsonl(std::ostream& out, const SearchTrace& trace);

}  // namespace condcrop
