#include "wgmf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wgmf {

WeightedNodes gauss_hermite_normal(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need at least one node");

  // Roots of the physicists' Hermite polynomial H_n by Newton's method on the
  // orthonormal recurrence, using the asymptotic initial guesses of Numerical
  // Recipes' gauher. Roots are symmetric; only the nonnegative half is solved.
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  double root = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      root = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      root -= 1.14 * std::pow(static_cast<double>(n), 0.426) / root;
    } else if (i == 2) {
      root = 1.86 * root - 0.86 * x[0];
    } else if (i == 3) {
      root = 1.91 * root - 0.91 * x[1];
    } else {
      root = 2.0 * root - x[i - 2];
    }
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = root * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      deriv = std::sqrt(2.0 * n) * p2;
      const double step = p1 / deriv;
      root -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(root))) break;
    }
    x[i] = root;
    x[n - 1 - i] = -root;
    w[i] = 2.0 / (deriv * deriv);
    w[n - 1 - i] = w[i];
  }

  // e^{-x²} weight → standard normal: z = √2 x, weight / √π.
  WeightedNodes out;
  out.points.reserve(static_cast<std::size_t>(n));
  out.weights.reserve(static_cast<std::size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    out.points.push_back({std::numbers::sqrt2 * x[k]});
    out.weights.push_back(w[k] / std::sqrt(std::numbers::pi));
  }
  return out;
}

void Quadrature::validate(int L, const TargetDistribution& target) const {
  if (const auto* gh = std::get_if<GaussHermiteRule>(&z_rule)) {
    if (L != 1) throw std::invalid_argument("quadrature.z: gauss_hermite requires L = 1");
    if (gh->n_nodes < 1) throw std::invalid_argument("quadrature.z: nodes must be >= 1");
  } else if (std::get<MonteCarloRule>(z_rule).n_samples < 1) {
    throw std::invalid_argument("quadrature.z: n_samples must be >= 1");
  }
  if (std::holds_alternative<ExactAtomicRule>(x_rule)) {
    if (target.kind() != TargetDistribution::Kind::atomic) {
      throw std::invalid_argument("quadrature.x: exact rule requires an atomic target");
    }
  } else if (std::get<MonteCarloRule>(x_rule).n_samples < 1) {
    throw std::invalid_argument("quadrature.x: n_samples must be >= 1");
  }
}

WeightedNodes Quadrature::latent_nodes(int L) const {
  if (const auto* gh = std::get_if<GaussHermiteRule>(&z_rule)) {
    if (L != 1) throw std::invalid_argument("quadrature.z: gauss_hermite requires L = 1");
    return gauss_hermite_normal(gh->n_nodes);
  }
  const auto& mc = std::get<MonteCarloRule>(z_rule);
  RngStream rng(mc.seed, StreamPurpose::quadrature_latent, 0, 0);
  WeightedNodes out;
  out.points.reserve(mc.n_samples);
  for (std::size_t s = 0; s < mc.n_samples; ++s) out.points.push_back(sample_latent(L, rng));
  out.weights.assign(mc.n_samples, 1.0 / static_cast<double>(mc.n_samples));
  return out;
}

WeightedNodes Quadrature::target_nodes(const TargetDistribution& target) const {
  if (std::holds_alternative<ExactAtomicRule>(x_rule)) {
    if (target.kind() != TargetDistribution::Kind::atomic) {
      throw std::invalid_argument("quadrature.x: exact rule requires an atomic target");
    }
    return WeightedNodes{target.points(), target.weights()};
  }
  const auto& mc = std::get<MonteCarloRule>(x_rule);
  RngStream rng(mc.seed, StreamPurpose::quadrature_target, 0, 0);
  WeightedNodes out;
  out.points.reserve(mc.n_samples);
  for (std::size_t s = 0; s < mc.n_samples; ++s) out.points.push_back(target.sample(rng));
  out.weights.assign(mc.n_samples, 1.0 / static_cast<double>(mc.n_samples));
  return out;
}

}  // namespace wgmf
