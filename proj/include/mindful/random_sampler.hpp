#pragma once

#include <cstdint>
#include <vector>

#include "mindful/core.hpp"

namespace mindful {

struct RandomSamplerConfig {
  std::size_t num_samples = 1000;
  std::uint64_t rng_seed = 0;
  double bernoulli_p = 0.5;  // probability that a superpixel stays active

  void validate() const;
};

// Row 0 is the unperturbed all-ones mask; every other entry is an
// independent Bernoulli(p) draw.
//
// Stream: std::mt19937_64 seeded with rng_seed. Each entry consumes one
// 64-bit output x, row-major; u = (x >> 11) * 2^-53 and the entry is 1 iff
// u < bernoulli_p. The mapping avoids std::bernoulli_distribution so the
// stream is identical across standard libraries.
std::vector<MaskVector> generate_random(std::size_t segment_count, const RandomSamplerConfig& cfg);

}  // namespace mindful
