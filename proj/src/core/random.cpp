#include "igo/core/random.hpp"

#include <cmath>
#include <numbers>

namespace igo {

namespace {

std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double standard_normal(Rng& rng) {
  // 1 - u keeps the logarithm argument in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = finalize(master + 0x9e3779b97f4a7c15ULL);
  h = finalize(h ^ (a + 0x632be59bd9b4e019ULL));
  h = finalize(h ^ (b + 0x85157af5ULL));
  h = finalize(h ^ (c + 0xd6e8feb86659fd93ULL));
  return h;
}

}  // namespace igo
