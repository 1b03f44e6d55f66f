#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "condcrop/geometry.hpp"
#include "condcrop/scoring.hpp"

namespace condcrop {

inline constexpr int kMinBaseStep = 12;
inline constexpr int kDefaultKStart = 14;
inline constexpr int kDefaultKEnd = 28;

struct StepPair {
  int step_h = kMinBaseStep;
  int step_w = kMinBaseStep;
  friend bool operator==(const StepPair&, const StepPair&) = default;
};

/// Base window size whose width/height ratio best matches omega, scaled up by
/// the smallest integer factor that makes both sides at least 12 pixels.
StepPair get_step_size(AspectRatio omega);

struct ProposalSet {
  std::vector<CropBox> boxes;
  AspectRatio omega{1.0};
  int k_start = kDefaultKStart;
  int k_end = kDefaultKEnd;
  Dims dims;
  StepPair steps;
  int offset_h = kMinBaseStep;
  int offset_w = kMinBaseStep;
};

/// Sliding-window proposals of size (k*step_h, k*step_w) for k in
/// [k_start, k_end], ordered by k, then row, then column. Throws
/// EmptyProposalSet if nothing fits.
ProposalSet generate_proposals(const Dims& dims, AspectRatio omega, int k_start = kDefaultKStart,
                               int k_end = kDefaultKEnd);

struct SearchResult {
  CropBox box;
  ScoreBreakdown breakdown;
  std::size_t index = 0;
};

/// Argmax of the scorer over the proposals; ties go to the earliest proposal.
/// With threads > 1 candidates are scored in parallel chunks and reduced in
/// generation order, giving the same winner as the sequential scan.
SearchResult exhaustive_search(const CandidateScorer& score, const ProposalSet& set, unsigned threads = 1);

/// One {"x","y","w","h"} object per line.
void write_proposals_jsonl(std::ostream& out, const ProposalSet& set);

}  // namespace condcrop
