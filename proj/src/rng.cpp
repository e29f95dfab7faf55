#include "rmatch/rng.hpp"

#include <cmath>

#include "rmatch/error.hpp"

namespace rmatch {

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double exponential_from_uniform(double u, double rate) {
  // + 0.0 turns -0 (u == 1) into +0.
  return -std::log(u) / rate + 0.0;
}

double sample_exponential(double rate, RngStream& rng) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidArgument("exponential rate must be positive and finite");
  }
  return exponential_from_uniform(rng.next_unit_open_closed(), rate);
}

}  // namespace rmatch
