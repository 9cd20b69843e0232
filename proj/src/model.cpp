#include "wgmf/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wgmf {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
    }
  }
}

void require_weights(const std::vector<double>& weights, std::size_t count) {
  if (weights.size() != count || count == 0) {
    throw std::invalid_argument("target: weights must match the number of components");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("target: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("target: weights must sum to 1");
  }
}

double dot(std::span<const double> u, std::span<const double> v) {
  return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
}

}  // namespace

// GeneratorParticle

GeneratorParticle::GeneratorParticle(Dims dims)
    : dims_(dims), values_(static_cast<std::size_t>(dims.generator_size()), 0.0) {
  if (dims.K < 1 || dims.L < 1) throw std::invalid_argument("generator: K and L must be >= 1");
}

GeneratorParticle::GeneratorParticle(Dims dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (dims.K < 1 || dims.L < 1) throw std::invalid_argument("generator: K and L must be >= 1");
  if (values_.size() != static_cast<std::size_t>(dims.generator_size())) {
    throw std::invalid_argument("generator: expected K*(L+2) coordinates");
  }
  require_finite(values_, "generator");
}

double GeneratorParticle::neuron(int j, std::span<const double> z, const Activation& act) const {
  return alpha(j) * act(dot(beta(j), z) + gamma(j));
}

// DiscriminatorParticle

DiscriminatorParticle::DiscriminatorParticle(int K)
    : K_(K), values_(static_cast<std::size_t>(K + 2), 0.0) {
  if (K < 1) throw std::invalid_argument("discriminator: K must be >= 1");
}

DiscriminatorParticle::DiscriminatorParticle(int K, std::vector<double> values)
    : K_(K), values_(std::move(values)) {
  if (K < 1) throw std::invalid_argument("discriminator: K must be >= 1");
  if (values_.size() != static_cast<std::size_t>(K + 2)) {
    throw std::invalid_argument("discriminator: expected K+2 coordinates");
  }
  for (double v : values_) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw std::invalid_argument("discriminator: coordinate outside [-1, 1]");
    }
  }
}

DiscriminatorParticle DiscriminatorParticle::projected(int K, std::vector<double> values) {
  DiscriminatorParticle p(K);
  p.assign_projected(values);
  return p;
}

void DiscriminatorParticle::assign_projected(std::span<const double> values) {
  if (values.size() != values_.size()) {
    throw std::invalid_argument("discriminator: expected K+2 coordinates");
  }
  require_finite(values, "discriminator");
  std::transform(values.begin(), values.end(), values_.begin(),
                 [](double v) { return std::clamp(v, -1.0, 1.0); });
}

double DiscriminatorParticle::preactivation(std::span<const double> x) const {
  return dot(b(), x) + c();
}

// EnsemblePair

EnsemblePair::EnsemblePair(Dims dims, std::vector<GeneratorParticle> generators,
                           std::vector<DiscriminatorParticle> discriminators, Activation activation)
    : dims_(dims),
      generators_(std::move(generators)),
      discriminators_(std::move(discriminators)),
      activation_(std::move(activation)) {
  if (generators_.empty() || discriminators_.empty()) {
    throw std::invalid_argument("ensemble: N and M must be >= 1");
  }
  for (const auto& g : generators_) {
    if (!(g.dims() == dims_)) throw std::invalid_argument("ensemble: generator dims mismatch");
  }
  for (const auto& d : discriminators_) {
    if (d.K() != dims_.K) throw std::invalid_argument("ensemble: discriminator dims mismatch");
  }
}

// TargetDistribution

TargetDistribution TargetDistribution::atomic(std::vector<std::vector<double>> atoms,
                                              std::vector<double> weights) {
  require_weights(weights, atoms.size());
  TargetDistribution t;
  t.kind_ = Kind::atomic;
  t.dim_ = static_cast<int>(atoms.front().size());
  if (t.dim_ < 1) throw std::invalid_argument("target: atoms must have dimension >= 1");
  for (const auto& a : atoms) {
    if (static_cast<int>(a.size()) != t.dim_) {
      throw std::invalid_argument("target: atoms must share one dimension");
    }
    require_finite(a, "target atom");
  }
  t.points_ = std::move(atoms);
  t.weights_ = std::move(weights);
  return t;
}

TargetDistribution TargetDistribution::gaussian_mixture(std::vector<std::vector<double>> means,
                                                        std::vector<std::vector<double>> covariances,
                                                        std::vector<double> weights) {
  require_weights(weights, means.size());
  if (covariances.size() != means.size()) {
    throw std::invalid_argument("target: one covariance per mixture component required");
  }
  TargetDistribution t;
  t.kind_ = Kind::gaussian_mixture;
  t.dim_ = static_cast<int>(means.front().size());
  if (t.dim_ < 1) throw std::invalid_argument("target: means must have dimension >= 1");
  const auto d = static_cast<std::size_t>(t.dim_);
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != d || covariances[k].size() != d * d) {
      throw std::invalid_argument("target: mean/covariance shape mismatch");
    }
    // Cholesky–Banachiewicz
    const auto& cov = covariances[k];
    std::vector<double> chol(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = cov[i * d + j];
        for (std::size_t m = 0; m < j; ++m) s -= chol[i * d + m] * chol[j * d + m];
        if (i == j) {
          if (!(s > 0.0)) throw std::invalid_argument("target: covariance not positive definite");
          chol[i * d + i] = std::sqrt(s);
        } else {
          chol[i * d + j] = s / chol[j * d + j];
        }
      }
    }
    t.chol_.push_back(std::move(chol));
  }
  t.points_ = std::move(means);
  t.weights_ = std::move(weights);
  return t;
}

TargetDistribution TargetDistribution::bimodal() { return atomic({{-1.0}, {1.0}}, {0.5, 0.5}); }

std::size_t TargetDistribution::pick_component(RngStream& rng) const {
  if (weights_.size() == 1) return 0;
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    cumulative += weights_[k];
    if (u < cumulative) return k;
  }
  return weights_.size() - 1;
}

std::vector<double> TargetDistribution::sample(RngStream& rng) const {
  const std::size_t k = pick_component(rng);
  if (kind_ == Kind::atomic) return points_[k];

  const auto d = static_cast<std::size_t>(dim_);
  std::vector<double> xi(d);
  for (auto& v : xi) v = rng.normal();
  std::vector<double> x = points_[k];
  const auto& chol = chol_[k];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) x[i] += chol[i * d + j] * xi[j];
  }
  return x;
}

// Initialization

double CoordinateLaw::sample(RngStream& rng) const {
  if (kind == Kind::uniform) return rng.uniform(lo, hi);
  // Rejection sampling; validate() guarantees the interval carries mass.
  for (;;) {
    const double v = mean + stddev * rng.normal();
    if (v >= lo && v <= hi) return v;
  }
}

void CoordinateLaw::validate(const char* field) const {
  const std::string name(field);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument(name + ": need finite lo < hi");
  }
  if (kind == Kind::truncated_normal) {
    if (!(stddev > 0.0) || !std::isfinite(mean)) {
      throw std::invalid_argument(name + ": truncated_normal needs stddev > 0 and finite mean");
    }
    // Acceptance probability must not be negligible.
    if ((lo - mean) / stddev > 6.0 || (mean - hi) / stddev > 6.0) {
      throw std::invalid_argument(name + ": truncation interval has negligible mass");
    }
  }
}

void InitDistribution::validate() const {
  alpha.validate("init.alpha");
  beta.validate("init.beta");
  gamma.validate("init.gamma");
  a.validate("init.a");
  b.validate("init.b");
  c.validate("init.c");
  const auto inside_box = [](const CoordinateLaw& law, const char* field) {
    if (law.lo < -1.0 || law.hi > 1.0) {
      throw std::invalid_argument(std::string(field) + ": support must lie in [-1, 1]");
    }
  };
  inside_box(a, "init.a");
  inside_box(b, "init.b");
  inside_box(c, "init.c");
}

GeneratorParticle InitDistribution::sample_generator(Dims dims, RngStream& rng) const {
  GeneratorParticle p(dims);
  auto v = p.values();
  for (int j = 0; j < dims.K; ++j) {
    const int off = p.slot_offset(j);
    v[off] = alpha.sample(rng);
    for (int l = 0; l < dims.L; ++l) v[off + 1 + l] = beta.sample(rng);
    v[off + dims.L + 1] = gamma.sample(rng);
  }
  return p;
}

DiscriminatorParticle InitDistribution::sample_discriminator(int K, RngStream& rng) const {
  std::vector<double> v(static_cast<std::size_t>(K + 2));
  v[0] = a.sample(rng);
  for (int l = 0; l < K; ++l) v[1 + l] = b.sample(rng);
  v[K + 1] = c.sample(rng);
  return DiscriminatorParticle(K, std::move(v));
}

EnsemblePair sample_ensemble(Dims dims, std::size_t N, std::size_t M, const InitDistribution& init,
                             std::uint64_t seed, Activation activation) {
  init.validate();
  std::vector<GeneratorParticle> gens;
  gens.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    RngStream rng(seed, StreamPurpose::init_generator, 0, i);
    gens.push_back(init.sample_generator(dims, rng));
  }
  std::vector<DiscriminatorParticle> discs;
  discs.reserve(M);
  for (std::size_t i = 0; i < M; ++i) {
    RngStream rng(seed, StreamPurpose::init_discriminator, 0, i);
    discs.push_back(init.sample_discriminator(dims.K, rng));
  }
  return EnsemblePair(dims, std::move(gens), std::move(discs), std::move(activation));
}

// Evaluation

std::vector<double> generator_eval(const EnsemblePair& ensemble, std::span<const double> z) {
  const int K = ensemble.dims().K;
  if (z.size() != static_cast<std::size_t>(ensemble.dims().L)) {
    throw std::invalid_argument("generator_eval: latent dimension mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(K), 0.0);
  for (const auto& p : ensemble.generators()) {
    for (int j = 0; j < K; ++j) out[j] += p.neuron(j, z, ensemble.activation());
  }
  const double inv_n = 1.0 / static_cast<double>(ensemble.N());
  for (auto& v : out) v *= inv_n;
  return out;
}

double discriminator_eval(const EnsemblePair& ensemble, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(ensemble.dims().K)) {
    throw std::invalid_argument("discriminator_eval: data dimension mismatch");
  }
  double sum = 0.0;
  for (const auto& w : ensemble.discriminators()) {
    sum += w.a() * ensemble.activation()(w.preactivation(x));
  }
  return sum / static_cast<double>(ensemble.M());
}

std::vector<double> sample_latent(int L, RngStream& rng) {
  std::vector<double> z(static_cast<std::size_t>(L));
  for (auto& v : z) v = rng.normal();
  return z;
}

std::vector<double> sample_target(const TargetDistribution& dist, RngStream& rng) {
  return dist.sample(rng);
}

}  // namespace wgmf
