#pragma once

#include <cstdint>
#include <random>

namespace condcrop {

/// Portable seeded generator; the distributions are written out here so that a
/// seed gives the same sequence on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double unit();                     // [0, 1)
  double unit_open_low();            // (0, 1]
  int uniform_int(int lo, int hi);   // inclusive
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace condcrop
