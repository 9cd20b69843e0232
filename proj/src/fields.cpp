#include "wgmf/fields.hpp"

#include <numeric>
#include <stdexcept>

namespace wgmf {
namespace {

double dot(std::span<const double> u, std::span<const double> v) {
  return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
}

}  // namespace

LatentEval evaluate_latent(const EnsemblePair& ensemble, std::span<const double> z) {
  LatentEval at;
  at.z.assign(z.begin(), z.end());
  at.G = generator_eval(ensemble, z);
  at.grad_D.assign(at.G.size(), 0.0);
  const auto& act = ensemble.activation();
  for (const auto& w : ensemble.discriminators()) {
    const double s = w.a() * act.first_derivative(w.preactivation(at.G));
    const auto b = w.b();
    for (std::size_t j = 0; j < at.grad_D.size(); ++j) at.grad_D[j] += s * b[j];
  }
  const double inv_m = 1.0 / static_cast<double>(ensemble.M());
  for (auto& g : at.grad_D) g *= inv_m;
  return at;
}

void accumulate_v_theta(const LatentEval& at, const GeneratorParticle& theta,
                        const Activation& act, double weight, std::span<double> out) {
  const int K = theta.dims().K;
  const int L = theta.dims().L;
  for (int j = 0; j < K; ++j) {
    const double u = dot(theta.beta(j), at.z) + theta.gamma(j);
    const double coef = -weight * at.grad_D[j];
    const double alpha = theta.alpha(j);
    const double ds = act.first_derivative(u);
    const int off = theta.slot_offset(j);
    out[off] += coef * act(u);
    for (int l = 0; l < L; ++l) out[off + 1 + l] += coef * alpha * at.z[l] * ds;
    out[off + L + 1] += coef * alpha * ds;
  }
}

std::vector<double> v_theta(const EnsemblePair& ensemble, const GeneratorParticle& theta,
                            std::span<const double> z) {
  const LatentEval at = evaluate_latent(ensemble, z);
  std::vector<double> out(theta.values().size(), 0.0);
  accumulate_v_theta(at, theta, ensemble.activation(), 1.0, out);
  return out;
}

void accumulate_grad_omega(std::span<const double> y, const DiscriminatorParticle& omega,
                           const Activation& act, double weight, std::span<double> out) {
  const double u = omega.preactivation(y);
  const double ds = weight * omega.a() * act.first_derivative(u);
  out[0] += weight * act(u);
  for (std::size_t l = 0; l < y.size(); ++l) out[1 + l] += ds * y[l];
  out[y.size() + 1] += ds;
}

std::vector<double> v_omega(const EnsemblePair& ensemble, const DiscriminatorParticle& omega,
                            std::span<const double> z, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(ensemble.dims().K)) {
    throw std::invalid_argument("v_omega: data dimension mismatch");
  }
  const auto G = generator_eval(ensemble, z);
  std::vector<double> out(omega.values().size(), 0.0);
  accumulate_grad_omega(G, omega, ensemble.activation(), 1.0, out);
  accumulate_grad_omega(x, omega, ensemble.activation(), -1.0, out);
  return out;
}

FieldEvaluator::FieldEvaluator(const EnsemblePair& ensemble, const TargetDistribution& target,
                               const Quadrature& quad)
    : FieldEvaluator(ensemble, (quad.validate(ensemble.dims().L, target),
                                quad.latent_nodes(ensemble.dims().L)),
                     quad.target_nodes(target)) {}

FieldEvaluator::FieldEvaluator(const EnsemblePair& ensemble, const WeightedNodes& latent,
                               const WeightedNodes& data)
    : activation_(ensemble.activation()), latent_weights_(latent.weights), data_(data) {
  for (const auto& x : data_.points) {
    if (x.size() != static_cast<std::size_t>(ensemble.dims().K)) {
      throw std::invalid_argument("fields: target dimension differs from K");
    }
  }
  latent_.reserve(latent.size());
  for (const auto& z : latent.points) latent_.push_back(evaluate_latent(ensemble, z));
  energy_ = 0.0;
  for (std::size_t q = 0; q < latent_.size(); ++q) {
    energy_ += latent_weights_[q] * discriminator_eval(ensemble, latent_[q].G);
  }
  for (std::size_t r = 0; r < data_.size(); ++r) {
    energy_ -= data_.weights[r] * discriminator_eval(ensemble, data_.points[r]);
  }
}

double FieldEvaluator::energy() const { return energy_; }

std::vector<double> FieldEvaluator::V_theta(const GeneratorParticle& theta) const {
  std::vector<double> out(theta.values().size(), 0.0);
  for (std::size_t q = 0; q < latent_.size(); ++q) {
    accumulate_v_theta(latent_[q], theta, activation_, latent_weights_[q], out);
  }
  return out;
}

std::vector<double> FieldEvaluator::V_omega(const DiscriminatorParticle& omega) const {
  std::vector<double> out(omega.values().size(), 0.0);
  for (std::size_t q = 0; q < latent_.size(); ++q) {
    accumulate_grad_omega(latent_[q].G, omega, activation_, latent_weights_[q], out);
  }
  for (std::size_t r = 0; r < data_.size(); ++r) {
    accumulate_grad_omega(data_.points[r], omega, activation_, -data_.weights[r], out);
  }
  return out;
}

double energy(const EnsemblePair& ensemble, const TargetDistribution& target,
              const Quadrature& quad) {
  return FieldEvaluator(ensemble, target, quad).energy();
}

std::vector<double> V_theta(const EnsemblePair& ensemble, const GeneratorParticle& theta,
                            const TargetDistribution& target, const Quadrature& quad) {
  return FieldEvaluator(ensemble, target, quad).V_theta(theta);
}

std::vector<double> V_omega(const EnsemblePair& ensemble, const DiscriminatorParticle& omega,
                            const TargetDistribution& target, const Quadrature& quad) {
  return FieldEvaluator(ensemble, target, quad).V_omega(omega);
}

}  // namespace wgmf
