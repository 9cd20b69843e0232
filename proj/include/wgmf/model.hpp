#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wgmf/activation.hpp"
#include "wgmf/rng.hpp"

namespace wgmf {

/// Data dimension K (generator output, discriminator input) and latent
/// dimension L.
struct Dims {
  int K = 1;
  int L = 1;

  int generator_size() const { return K * (L + 2); }
  int discriminator_size() const { return K + 2; }
  bool operator==(const Dims&) const = default;
};

/// One generator neuron bundle θ = (θ_1, …, θ_K), θ_j = (α_j, β_j ∈ ℝ^L, γ_j).
///
/// Stored flat: slot j occupies [j·(L+2), (j+1)·(L+2)) as (α_j, β_j, γ_j).
class GeneratorParticle {
 public:
  explicit GeneratorParticle(Dims dims);
  GeneratorParticle(Dims dims, std::vector<double> values);

  const Dims& dims() const { return dims_; }
  int slot_offset(int j) const { return j * (dims_.L + 2); }

  double alpha(int j) const { return values_[slot_offset(j)]; }
  std::span<const double> beta(int j) const {
    return {values_.data() + slot_offset(j) + 1, static_cast<std::size_t>(dims_.L)};
  }
  double gamma(int j) const { return values_[slot_offset(j) + dims_.L + 1]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// α_j σ(β_j·z + γ_j)
  double neuron(int j, std::span<const double> z, const Activation& act) const;

 private:
  Dims dims_;
  std::vector<double> values_;
};

/// One discriminator neuron ω = (a, b ∈ ℝ^K, c), always inside Q = [-1,1]^{K+2}.
class DiscriminatorParticle {
 public:
  explicit DiscriminatorParticle(int K);
  /// Throws std::invalid_argument if any coordinate lies outside [-1, 1].
  DiscriminatorParticle(int K, std::vector<double> values);

  /// Clamps `values` onto Q.
  static DiscriminatorParticle projected(int K, std::vector<double> values);

  int K() const { return K_; }
  double a() const { return values_[0]; }
  std::span<const double> b() const { return {values_.data() + 1, static_cast<std::size_t>(K_)}; }
  double c() const { return values_[K_ + 1]; }
  std::span<const double> values() const { return values_; }

  /// Replace the coordinates by the projection of `values` onto Q.
  void assign_projected(std::span<const double> values);

  /// b·x + c
  double preactivation(std::span<const double> x) const;

 private:
  int K_;
  std::vector<double> values_;
};

/// Generator and discriminator particle clouds (μ_N, ν_M) with uniform weights.
class EnsemblePair {
 public:
  EnsemblePair(Dims dims, std::vector<GeneratorParticle> generators,
               std::vector<DiscriminatorParticle> discriminators,
               Activation activation = Activation::sigmoid());

  const Dims& dims() const { return dims_; }
  std::size_t N() const { return generators_.size(); }
  std::size_t M() const { return discriminators_.size(); }
  const Activation& activation() const { return activation_; }

  const std::vector<GeneratorParticle>& generators() const { return generators_; }
  const std::vector<DiscriminatorParticle>& discriminators() const { return discriminators_; }
  std::vector<GeneratorParticle>& mutable_generators() { return generators_; }
  std::vector<DiscriminatorParticle>& mutable_discriminators() { return discriminators_; }

 private:
  Dims dims_;
  std::vector<GeneratorParticle> generators_;
  std::vector<DiscriminatorParticle> discriminators_;
  Activation activation_;
};

/// Law P_* of the data: a finite atomic mixture or a Gaussian mixture.
class TargetDistribution {
 public:
  enum class Kind { atomic, gaussian_mixture };

  static TargetDistribution atomic(std::vector<std::vector<double>> atoms,
                                   std::vector<double> weights);
  /// `covariances[k]` is a row-major K×K symmetric positive definite matrix.
  static TargetDistribution gaussian_mixture(std::vector<std::vector<double>> means,
                                             std::vector<std::vector<double>> covariances,
                                             std::vector<double> weights);
  /// ½δ_{-1} + ½δ_{+1} on the real line.
  static TargetDistribution bimodal();

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  std::vector<double> sample(RngStream& rng) const;

 private:
  TargetDistribution() = default;
  std::size_t pick_component(RngStream& rng) const;

  Kind kind_ = Kind::atomic;
  int dim_ = 0;
  std::vector<std::vector<double>> points_;  // atoms or means
  std::vector<std::vector<double>> chol_;    // lower Cholesky factors (mixture only)
  std::vector<double> weights_;
};

/// Law of a single coordinate at initialization.
struct CoordinateLaw {
  enum class Kind { uniform, truncated_normal };
  Kind kind = Kind::uniform;
  double lo = -1.0;
  double hi = 1.0;
  double mean = 0.0;
  double stddev = 1.0;

  double sample(RngStream& rng) const;
  void validate(const char* field) const;
};

/// Product law μ_in ⊗ ν_in used to initialize the particles.
struct InitDistribution {
  CoordinateLaw alpha, beta, gamma;
  CoordinateLaw a, b, c;

  /// Throws std::invalid_argument naming the offending field. The discriminator
  /// laws must be supported inside [-1, 1] so that ν_in lies in Q.
  void validate() const;

  GeneratorParticle sample_generator(Dims dims, RngStream& rng) const;
  DiscriminatorParticle sample_discriminator(int K, RngStream& rng) const;
};

/// Independent draws: generator i from substream (init_generator, 0, i) and
/// discriminator i from (init_discriminator, 0, i).
EnsemblePair sample_ensemble(Dims dims, std::size_t N, std::size_t M, const InitDistribution& init,
                             std::uint64_t seed, Activation activation = Activation::sigmoid());

/// G_μ(z)_j = (1/N) Σ_i α_j^i σ(β_j^i·z + γ_j^i)
std::vector<double> generator_eval(const EnsemblePair& ensemble, std::span<const double> z);

/// D_ν(x) = (1/M) Σ_i a^i σ(b^i·x + c^i)
double discriminator_eval(const EnsemblePair& ensemble, std::span<const double> x);

std::vector<double> sample_latent(int L, RngStream& rng);
std::vector<double> sample_target(const TargetDistribution& dist, RngStream& rng);

}  // namespace wgmf
