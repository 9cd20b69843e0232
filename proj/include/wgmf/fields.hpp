#pragma once

#include <span>
#include <vector>

#include "wgmf/model.hpp"
#include "wgmf/quadrature.hpp"

namespace wgmf {

/// Quantities at one latent point z that every particle's field needs:
/// the generator output G_μ(z) and the critic gradient ∇D_ν(G_μ(z)).
struct LatentEval {
  std::vector<double> z;
  std::vector<double> G;       // G_μ(z), length K
  std::vector<double> grad_D;  // (1/M) Σ_i a^i b^i σ'(b^i·G + c^i), length K
};

LatentEval evaluate_latent(const EnsemblePair& ensemble, std::span<const double> z);

/// Per-sample generator field v^Θ(θ, z) = −∇_θ [∇D_ν(G_μ(z)) · (σ(z; θ_1), …, σ(z; θ_K))].
/// Result has the flat GeneratorParticle layout.
std::vector<double> v_theta(const EnsemblePair& ensemble, const GeneratorParticle& theta,
                            std::span<const double> z);
void accumulate_v_theta(const LatentEval& at, const GeneratorParticle& theta,
                        const Activation& act, double weight, std::span<double> out);

/// Per-sample critic field v^Ω(ω, z, x) = ∇_ω [σ(G_μ(z); ω) − σ(x; ω)], layout (a, b, c).
std::vector<double> v_omega(const EnsemblePair& ensemble, const DiscriminatorParticle& omega,
                            std::span<const double> z, std::span<const double> x);
/// Adds weight · ∇_ω σ(y; ω) to `out`.
void accumulate_grad_omega(std::span<const double> y, const DiscriminatorParticle& omega,
                           const Activation& act, double weight, std::span<double> out);

/// Quadrature-averaged fields and energy for a frozen ensemble.
///
/// Construction evaluates G_μ and ∇D_ν once per latent node, so each particle
/// field costs O(nodes · K · L) afterwards.
class FieldEvaluator {
 public:
  FieldEvaluator(const EnsemblePair& ensemble, const TargetDistribution& target,
                 const Quadrature& quad);
  /// Reuse precomputed node sets (avoids recomputing Gauss–Hermite nodes every step).
  FieldEvaluator(const EnsemblePair& ensemble, const WeightedNodes& latent,
                 const WeightedNodes& data);

  /// E[μ, ν] = ∫ D_ν(G_μ(z)) dN(z) − ∫ D_ν(x) dP_*(x)
  double energy() const;
  /// V^Θ(θ) = 𝔼_z v^Θ(θ, z) = −∇_θ δE/δμ
  std::vector<double> V_theta(const GeneratorParticle& theta) const;
  /// V^Ω(ω) = 𝔼_z 𝔼_x v^Ω(ω, z, x) = +∇_ω δE/δν; depends on μ only.
  std::vector<double> V_omega(const DiscriminatorParticle& omega) const;

  const std::vector<LatentEval>& latent() const { return latent_; }

 private:
  Activation activation_;
  std::vector<LatentEval> latent_;
  std::vector<double> latent_weights_;
  WeightedNodes data_;
  double energy_ = 0.0;
};

double energy(const EnsemblePair& ensemble, const TargetDistribution& target,
              const Quadrature& quad);
std::vector<double> V_theta(const EnsemblePair& ensemble, const GeneratorParticle& theta,
                            const TargetDistribution& target, const Quadrature& quad);
std::vector<double> V_omega(const EnsemblePair& ensemble, const DiscriminatorParticle& omega,
                            const TargetDistribution& target, const Quadrature& quad);

}  // namespace wgmf
