#include "wgmf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wgmf/transport.hpp"

namespace wgmf {
namespace {

std::size_t count_pinned(const EnsemblePair& e) {
  const Box q = Box::unit(e.dims().discriminator_size());
  std::size_t n = 0;
  for (const auto& d : e.discriminators()) n += wgmf::count_pinned(q, d.values());
  return n;
}

double max_alpha_growth(const EnsemblePair& initial, const EnsemblePair& now) {
  double worst = 0.0;
  for (std::size_t i = 0; i < now.N(); ++i) {
    for (int j = 0; j < now.dims().K; ++j) {
      worst = std::max(worst, std::abs(now.generators()[i].alpha(j)) -
                                  std::abs(initial.generators()[i].alpha(j)));
    }
  }
  return worst;
}

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

void SgdConfig::validate() const {
  if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("sgd.h: must be finite and >= 0");
  if (n_c < 1) throw std::invalid_argument("sgd.n_c: must be >= 1");
}

void MeanFieldConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("meanfield.dt: must be finite and >= 0");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("meanfield.T: must be finite and >= 0");
  }
  if (!(gamma_c >= 0.0) || !std::isfinite(gamma_c)) {
    throw std::invalid_argument("meanfield.gamma_c: must be finite and >= 0");
  }
}

std::size_t MeanFieldConfig::steps() const {
  if (dt == 0.0) return 0;
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

EnsemblePair sgd_update(const EnsemblePair& state, double h, std::span<const SamplePair> samples) {
  if (samples.empty()) throw std::invalid_argument("sgd_update: need at least one sample pair");
  EnsemblePair next = state;
  if (h == 0.0) return next;
  const auto& act = state.activation();
  const double step_omega = h / static_cast<double>(state.M());
  const double step_theta = h / static_cast<double>(state.N());

  // v^Ω depends on μ only, and μ is frozen during the critic sub-steps.
  std::vector<double> buf;
  for (const auto& s : samples) {
    const auto G = generator_eval(state, s.z);
    for (auto& w : next.mutable_discriminators()) {
      buf.assign(w.values().begin(), w.values().end());
      std::vector<double> v(buf.size(), 0.0);
      accumulate_grad_omega(G, w, act, 1.0, v);
      accumulate_grad_omega(s.x, w, act, -1.0, v);
      for (std::size_t l = 0; l < buf.size(); ++l) buf[l] += step_omega * v[l];
      w.assign_projected(buf);
    }
  }

  const LatentEval at = evaluate_latent(state, samples.front().z);
  for (auto& g : next.mutable_generators()) {
    std::vector<double> v(g.values().size(), 0.0);
    accumulate_v_theta(at, g, act, 1.0, v);
    auto vals = g.values();
    for (std::size_t l = 0; l < vals.size(); ++l) vals[l] += step_theta * v[l];
  }
  return next;
}

std::vector<SamplePair> draw_sgd_samples(const SgdConfig& cfg, int L,
                                         const TargetDistribution& target, std::uint64_t step) {
  std::vector<SamplePair> samples;
  samples.reserve(static_cast<std::size_t>(cfg.n_c));
  for (int l = 0; l < cfg.n_c; ++l) {
    RngStream zs(cfg.seed, StreamPurpose::sgd_latent, step, static_cast<std::uint64_t>(l));
    RngStream xs(cfg.seed, StreamPurpose::sgd_target, step, static_cast<std::uint64_t>(l));
    samples.push_back({sample_latent(L, zs), target.sample(xs)});
  }
  return samples;
}

EnsemblePair sgd_step(const EnsemblePair& state, const SgdConfig& cfg,
                      const TargetDistribution& target, std::uint64_t step) {
  cfg.validate();
  const auto samples = draw_sgd_samples(cfg, state.dims().L, target, step);
  return sgd_update(state, cfg.h, samples);
}

EnsemblePair meanfield_step(const EnsemblePair& state, const FieldEvaluator& fields, double dt,
                            double gamma_c) {
  EnsemblePair next = state;
  if (dt == 0.0) return next;
  for (std::size_t i = 0; i < state.N(); ++i) {
    const auto v = fields.V_theta(state.generators()[i]);
    auto vals = next.mutable_generators()[i].values();
    for (std::size_t l = 0; l < vals.size(); ++l) vals[l] += dt * v[l];
  }
  std::vector<double> buf;
  for (std::size_t i = 0; i < state.M(); ++i) {
    const auto& w = state.discriminators()[i];
    const auto v = fields.V_omega(w);
    buf.assign(w.values().begin(), w.values().end());
    for (std::size_t l = 0; l < buf.size(); ++l) buf[l] += dt * gamma_c * v[l];
    next.mutable_discriminators()[i].assign_projected(buf);
  }
  return next;
}

EnsemblePair meanfield_step(const EnsemblePair& state, const MeanFieldConfig& cfg,
                            const TargetDistribution& target) {
  cfg.validate();
  const FieldEvaluator fields(state, target, cfg.quad);
  return meanfield_step(state, fields, cfg.dt, cfg.gamma_c);
}

RunRecord run_sgd(const EnsemblePair& initial, const SgdConfig& cfg,
                  const TargetDistribution& target, const Quadrature& energy_quad,
                  std::size_t stride, const ProgressFn& progress) {
  cfg.validate();
  energy_quad.validate(initial.dims().L, target);
  stride = std::max<std::size_t>(stride, 1);
  const auto latent = energy_quad.latent_nodes(initial.dims().L);
  const auto data = energy_quad.target_nodes(target);
  const double dt = cfg.time_step(initial.N());

  RunRecord rec;
  EnsemblePair state = initial;
  auto record = [&](std::size_t n, bool snapshot) {
    const double t = static_cast<double>(n) * dt;
    const FieldEvaluator fields(state, latent, data);
    rec.diagnostics.push_back({t, fields.energy(), count_pinned(state), max_alpha_growth(initial, state)});
    if (snapshot) rec.snapshots.push(t, state);
  };
  record(0, true);
  for (std::size_t n = 0; n < cfg.steps; ++n) {
    state = sgd_step(state, cfg, target, n);
    record(n + 1, (n + 1) % stride == 0 || n + 1 == cfg.steps);
    if (progress) progress(n + 1, cfg.steps);
  }
  return rec;
}

RunRecord run_meanfield(const EnsemblePair& initial, const MeanFieldConfig& cfg,
                        const TargetDistribution& target, std::size_t stride,
                        const ProgressFn& progress) {
  cfg.validate();
  cfg.quad.validate(initial.dims().L, target);
  stride = std::max<std::size_t>(stride, 1);
  const auto latent = cfg.quad.latent_nodes(initial.dims().L);
  const auto data = cfg.quad.target_nodes(target);
  const std::size_t steps = cfg.steps();

  RunRecord rec;
  EnsemblePair state = initial;
  for (std::size_t n = 0;; ++n) {
    const FieldEvaluator fields(state, latent, data);
    const double t = static_cast<double>(n) * cfg.dt;
    rec.diagnostics.push_back({t, fields.energy(), count_pinned(state), max_alpha_growth(initial, state)});
    if (n % stride == 0 || n == steps) rec.snapshots.push(t, state);
    if (n == steps) break;
    state = meanfield_step(state, fields, cfg.dt, cfg.gamma_c);
    if (progress) progress(n + 1, steps);
  }
  return rec;
}

VectorTrajectory projected_euler(const BoxField& field, const Box& box, std::span<const double> x0,
                                 double dt, double T, std::size_t stride) {
  if (!box.contains(x0)) throw std::invalid_argument("projected_euler: initial point outside the box");
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("projected_euler: need dt > 0, T >= 0");
  stride = std::max<std::size_t>(stride, 1);
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  VectorTrajectory traj;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> v(x.size());
  traj.push(0.0, x);
  for (std::size_t n = 1; n <= steps; ++n) {
    std::fill(v.begin(), v.end(), 0.0);
    field(x, v);
    for (std::size_t l = 0; l < x.size(); ++l) x[l] += dt * v[l];
    project_box_inplace(box, x);
    if (n % stride == 0 || n == steps) traj.push(static_cast<double>(n) * dt, x);
  }
  return traj;
}

EnsemblePair interpolate(const EnsembleTrajectory& traj, double t) {
  const auto& times = traj.times();
  if (traj.empty() || t < times.front() || t > times.back()) {
    throw std::out_of_range("interpolate: time outside the recorded horizon");
  }
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return traj.back();
  const auto hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  if (t == times[lo]) return traj.states()[lo];
  const double s = (t - times[lo]) / (times[hi] - times[lo]);
  const EnsemblePair& a = traj.states()[lo];
  const EnsemblePair& b = traj.states()[hi];
  EnsemblePair out = a;
  for (std::size_t i = 0; i < a.N(); ++i) {
    auto dst = out.mutable_generators()[i].values();
    const auto va = a.generators()[i].values();
    const auto vb = b.generators()[i].values();
    for (std::size_t l = 0; l < dst.size(); ++l) dst[l] = (1.0 - s) * va[l] + s * vb[l];
  }
  std::vector<double> buf;
  for (std::size_t i = 0; i < a.M(); ++i) {
    const auto va = a.discriminators()[i].values();
    const auto vb = b.discriminators()[i].values();
    buf.resize(va.size());
    for (std::size_t l = 0; l < buf.size(); ++l) buf[l] = (1.0 - s) * va[l] + s * vb[l];
    // Convex combination of points of Q; the projection only absorbs rounding.
    out.mutable_discriminators()[i].assign_projected(buf);
  }
  return out;
}

PinningRecord flow_discriminators(const EnsemblePair& initial, const BoxField& field, double dt,
                                  double T) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("flow_discriminators: need dt > 0, T >= 0");
  const Box q = Box::unit(initial.dims().discriminator_size());
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  PinningRecord rec{{}, {}, initial};
  std::vector<double> buf;
  std::vector<double> v;
  rec.times.push_back(0.0);
  rec.pinned.push_back(count_pinned(initial));
  for (std::size_t n = 1; n <= steps; ++n) {
    for (auto& w : rec.final_state.mutable_discriminators()) {
      buf.assign(w.values().begin(), w.values().end());
      v.assign(buf.size(), 0.0);
      field(buf, v);
      for (std::size_t l = 0; l < buf.size(); ++l) buf[l] += dt * v[l];
      project_box_inplace(q, buf);
      w.assign_projected(buf);
    }
    rec.times.push_back(static_cast<double>(n) * dt);
    rec.pinned.push_back(count_pinned(rec.final_state));
  }
  return rec;
}

void CoupledRunSpec::validate() const {
  sgd.validate();
  meanfield.validate();
  init.validate();
  meanfield.quad.validate(dims.L, target);
  if (N < 1 || M < 1) throw std::invalid_argument("couple: N and M must be >= 1");
  if (target.dim() != dims.K) throw std::invalid_argument("target: dimension differs from K");
  if (!close_rel(meanfield.dt, sgd.h / static_cast<double>(N))) {
    throw std::invalid_argument("meanfield.dt: must equal h/N for a coupled run");
  }
  const double expected_gamma = sgd.n_c * static_cast<double>(N) / static_cast<double>(M);
  if (!close_rel(meanfield.gamma_c, expected_gamma)) {
    throw std::invalid_argument("meanfield.gamma_c: must equal n_c*N/M for a coupled run");
  }
  if (exact_d2 && (N > kAssignmentCap || M > kAssignmentCap)) {
    throw std::invalid_argument("couple.exact_d2: N and M must not exceed the assignment cap");
  }
}

CoupledSeries coupled_run(const CoupledRunSpec& spec) {
  spec.validate();
  const EnsemblePair initial = sample_ensemble(spec.dims, spec.N, spec.M, spec.init, spec.seed, spec.activation);
  SgdConfig sgd = spec.sgd;
  sgd.seed = spec.seed;
  const auto latent = spec.meanfield.quad.latent_nodes(spec.dims.L);
  const auto data = spec.meanfield.quad.target_nodes(spec.target);
  const std::size_t steps = spec.meanfield.steps();

  CoupledSeries out;
  EnsemblePair discrete = initial;
  EnsemblePair continuum = initial;
  auto record = [&](std::size_t n) {
    out.times.push_back(static_cast<double>(n) * spec.meanfield.dt);
    const double d = joint_param_distance(discrete, continuum, 2.0);
    out.coupling_cost.push_back(d * d);
    if (spec.exact_d2) {
      const double dg = wasserstein_assignment(2.0, generator_cloud(discrete), generator_cloud(continuum));
      const double dd =
          wasserstein_assignment(2.0, discriminator_cloud(discrete), discriminator_cloud(continuum));
      out.exact_d2_sq.push_back(dg * dg + dd * dd);
    }
  };
  record(0);
  for (std::size_t n = 0; n < steps; ++n) {
    const FieldEvaluator fields(continuum, latent, data);
    continuum = meanfield_step(continuum, fields, spec.meanfield.dt, spec.meanfield.gamma_c);
    discrete = sgd_step(discrete, sgd, spec.target, n);
    record(n + 1);
  }
  return out;
}

}  // namespace wgmf
