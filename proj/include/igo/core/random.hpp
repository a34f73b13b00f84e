#pragma once

#include <cstdint>
#include <limits>

namespace igo {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
///
/// Used as the per-sample substream engine: each (seed, step, index, tag)
/// tuple maps to an independent stream, so a batch is reproducible regardless
/// of the order or thread on which its samples are drawn.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal draw (Box-Muller on two uniforms; deterministic across platforms).
double standard_normal(Rng& rng);

/// Stream purposes, so that update samples, Fisher samples and noise never share a stream.
enum class StreamTag : std::uint64_t {
  update = 1,
  fisher_a = 2,
  fisher_b = 3,
  diagnostics = 4,
  noise = 5,
  init = 6,
  problem = 7,
};

/// Mixes a tuple of words into one 64-bit seed.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

/// Counter-based family of substreams for one step of one run.
class StreamFactory {
 public:
  StreamFactory(std::uint64_t master_seed, std::uint64_t step, StreamTag tag)
      : master_(master_seed), step_(step), tag_(tag) {}

  Rng stream(std::uint64_t index) const {
    return Rng(mix_seed(master_, step_, static_cast<std::uint64_t>(tag_), index));
  }

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t step() const { return step_; }
  StreamTag tag() const { return tag_; }

  StreamFactory with_tag(StreamTag tag) const { return {master_, step_, tag}; }

 private:
  std::uint64_t master_;
  std::uint64_t step_;
  StreamTag tag_;
};

}  // namespace igo
