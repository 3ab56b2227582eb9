#include "mindful/random_sampler.hpp"

#include <random>

namespace mindful {

void RandomSamplerConfig::validate() const {
  if (num_samples < 1) throw ContractViolation("random sampler: num_samples must be >= 1");
  if (!(bernoulli_p > 0.0 && bernoulli_p < 1.0))
    throw ContractViolation("random sampler: bernoulli_p must lie in (0,1)");
}

std::vector<MaskVector> generate_random(std::size_t segment_count, const RandomSamplerConfig& cfg) {
  cfg.validate();
  if (segment_count < 1) throw ContractViolation("random sampler: segment_count must be >= 1");
  std::mt19937_64 rng(cfg.rng_seed);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  std::vector<MaskVector> masks;
  masks.reserve(cfg.num_samples);
  masks.push_back(MaskVector::all_ones(segment_count));
  for (std::size_t i = 1; i < cfg.num_samples; ++i) {
    MaskVector m(segment_count, 0);
    for (std::size_t s = 0; s < segment_count; ++s) {
      const double u = static_cast<double>(rng() >> 11) * kScale;
      m.set(s, u < cfg.bernoulli_p);
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace mindful
