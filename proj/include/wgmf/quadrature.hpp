#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "wgmf/model.hpp"

namespace wgmf {

/// Nodes and weights (summing to one) representing a probability measure.
struct WeightedNodes {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Gauss–Hermite rule for the standard normal N(0, 1): ∑ w_k f(z_k) is exact
/// for polynomials of degree ≤ 2n − 1. Nodes are returned in increasing order.
WeightedNodes gauss_hermite_normal(int n);

struct MonteCarloRule {
  std::uint64_t seed = 0;
  std::size_t n_samples = 1;
};
struct GaussHermiteRule {
  int n_nodes = 64;
};
struct ExactAtomicRule {};

using LatentRule = std::variant<MonteCarloRule, GaussHermiteRule>;
using TargetRule = std::variant<ExactAtomicRule, MonteCarloRule>;

/// How expectations over z ~ N(0, I_L) and x ~ P_* are approximated.
struct Quadrature {
  LatentRule z_rule = GaussHermiteRule{};
  TargetRule x_rule = ExactAtomicRule{};

  /// Throws std::invalid_argument when the rule cannot be used with these
  /// dimensions (Gauss–Hermite needs L = 1, exact enumeration needs an atomic target).
  void validate(int L, const TargetDistribution& target) const;

  WeightedNodes latent_nodes(int L) const;
  WeightedNodes target_nodes(const TargetDistribution& target) const;
};

}  // namespace wgmf
