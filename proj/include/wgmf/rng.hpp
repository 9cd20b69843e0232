#pragma once

#include <cstdint>
#include <random>

namespace wgmf {

/// What a random substream is used for. Part of the substream key so that
/// draws for different purposes never share state.
enum class StreamPurpose : std::uint64_t {
  init_generator = 1,
  init_discriminator = 2,
  sgd_latent = 3,
  sgd_target = 4,
  quadrature_latent = 5,
  quadrature_target = 6,
  experiment = 7,
};

/// Mixes a master seed with (purpose, step, index) into a substream seed.
/// Uses the splitmix64 finalizer on each component in turn.
std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose, std::uint64_t step,
                          std::uint64_t index);

/// Independent random stream keyed by (master seed, purpose, step, index).
///
/// The same key always yields the same sequence, regardless of which other
/// streams exist or in which order they are consumed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master, StreamPurpose purpose, std::uint64_t step, std::uint64_t index)
      : engine_(derive_seed(master, purpose, step, index)) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double uniform01() { return uniform01_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform01_{0.0, 1.0};
};

}  // namespace wgmf
