#pragma once

#include <cstdint>
#include <random>

#include "fluctana/series.hpp"

namespace fluctana {

// Target scaling exponents are supported over 0 < alpha < 1.5.
inline constexpr double kMinAlpha = 0.0;
inline constexpr double kMaxAlpha = 1.5;

struct GeneratorSpec {
  int length = 0;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  bool normalize = true;  // rescale to zero mean, unit variance
};

struct CrossoverSpec {
  int length = 0;
  double alpha_short = 0.5;  // governs scales s < s_cross (high frequencies)
  double alpha_long = 0.5;   // governs scales s > s_cross (low frequencies)
  int s_cross = 0;
  std::uint64_t seed = 0;
  bool normalize = true;
};

// Additive trend A * (i/N)^q, i = 1..N.
struct TrendSpec {
  double amplitude = 0.0;
  double exponent = 1.0;
};

// Reproducible Gaussian source: mt19937_64 with Box-Muller. Uniform draws
// take the top 53 bits offset by half an ulp, so u is strictly inside (0,1)
// and the whole stream is pinned by the seed alone.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : rng_(seed) {}

  double uniform() {
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian();

  // unbiased draw from [0, n)
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Ensemble member seeds: members are numbered sequentially across study
// cells and each uses study_seed XOR its index.
inline std::uint64_t member_seed(std::uint64_t study_seed, std::uint64_t index) {
  return study_seed ^ index;
}

// Fourier-filtering surrogate with power-law spectrum S(f) ~ f^-beta,
// beta = 2*alpha - 1. Deterministic for a fixed seed.
Series generate_power_law(const GeneratorSpec& spec);

// Two-exponent spectrum split at f_x = 1/s_cross; continuous at the split.
Series generate_crossover(const CrossoverSpec& spec);

Series add_trend(const Series& series, const TrendSpec& trend);

// Permutes complete boxes of length `box` with a seeded uniform shuffle;
// a short remainder box stays in place at the end.
Series shuffle_boxes(const Series& series, int box, std::uint64_t seed);

// Keeps every factor-th sample (i = factor, 2*factor, ...).
Series downsample(const Series& series, int factor);

}  // namespace fluctana
