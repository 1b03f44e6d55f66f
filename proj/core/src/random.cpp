#include "condcrop/random.hpp"

#include <cmath>
#include <numbers>

namespace condcrop {

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::unit_open_low() { return 1.0 - unit(); }

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

double Rng::normal() {
  const double u1 = unit_open_low();
  const double u2 = unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace condcrop
