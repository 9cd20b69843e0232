#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wgmf/fields.hpp"
#include "wgmf/geometry.hpp"
#include "wgmf/model.hpp"
#include "wgmf/quadrature.hpp"

namespace wgmf {

/// Discrete training: learning rate h, n_c critic sub-steps per outer step.
/// Outer step n sits at time t_n = n·h/N.
struct SgdConfig {
  double h = 0.1;
  int n_c = 1;
  std::size_t steps = 0;
  std::uint64_t seed = 0;

  void validate() const;
  double time_step(std::size_t N) const { return h / static_cast<double>(N); }
};

/// Projected forward Euler discretization of the mean-field characteristics.
struct MeanFieldConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  double gamma_c = 1.0;
  Quadrature quad;

  void validate() const;
  std::size_t steps() const;
};

/// Time-stamped states with strictly increasing times.
template <class State>
class Trajectory {
 public:
  void push(double t, State s) {
    if (!times_.empty() && !(t > times_.back())) {
      throw std::logic_error("trajectory: times must be strictly increasing");
    }
    times_.push_back(t);
    states_.push_back(std::move(s));
  }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<State>& states() const { return states_; }
  const State& back() const { return states_.back(); }

 private:
  std::vector<double> times_;
  std::vector<State> states_;
};

using VectorTrajectory = Trajectory<std::vector<double>>;
using EnsembleTrajectory = Trajectory<EnsemblePair>;

struct StepDiagnostics {
  double t = 0.0;
  double energy = 0.0;
  std::size_t pinned = 0;          // discriminator coordinates sitting on a face of Q
  double max_alpha_growth = 0.0;   // max over particles and slots of |α(t)| − |α(0)|
};

/// Snapshots every `stride` steps (plus the final state) and diagnostics every step.
struct RunRecord {
  EnsembleTrajectory snapshots;
  std::vector<StepDiagnostics> diagnostics;
};

/// One latent/data draw used by a critic sub-step.
struct SamplePair {
  std::vector<double> z;
  std::vector<double> x;
};

/// One outer training step with explicit samples, one pair per critic sub-step:
///   ω_i ← Proj_Q(ω_i + (h/M) v^Ω(ω_i, z_l, x_l))   for l = 1..n_c,
///   θ_i ← θ_i + (h/N) v^Θ_{(μ^n, ν^n)}(θ_i, z_1).
/// Every particle sees the same samples. With n_c = 1 this is the simultaneous
/// update with a shared (z, x).
EnsemblePair sgd_update(const EnsemblePair& state, double h, std::span<const SamplePair> samples);

/// Draws the sub-step samples for outer step `step` from substreams keyed
/// (sgd_latent | sgd_target, step, l) and applies `sgd_update`.
EnsemblePair sgd_step(const EnsemblePair& state, const SgdConfig& cfg,
                      const TargetDistribution& target, std::uint64_t step);
std::vector<SamplePair> draw_sgd_samples(const SgdConfig& cfg, int L,
                                         const TargetDistribution& target, std::uint64_t step);

/// θ_i ← θ_i + dt V^Θ(θ_i);  ω_i ← Proj_Q(ω_i + dt γ_c V^Ω(ω_i)), fields frozen at `state`.
EnsemblePair meanfield_step(const EnsemblePair& state, const MeanFieldConfig& cfg,
                            const TargetDistribution& target);
EnsemblePair meanfield_step(const EnsemblePair& state, const FieldEvaluator& fields, double dt,
                            double gamma_c);

/// Called after every step with (steps done, total steps).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

RunRecord run_sgd(const EnsemblePair& initial, const SgdConfig& cfg,
                  const TargetDistribution& target, const Quadrature& energy_quad,
                  std::size_t stride = 10, const ProgressFn& progress = {});
RunRecord run_meanfield(const EnsemblePair& initial, const MeanFieldConfig& cfg,
                        const TargetDistribution& target, std::size_t stride = 10,
                        const ProgressFn& progress = {});

/// Vector field on a box; writes V(x) into `out`.
using BoxField = std::function<void(std::span<const double> x, std::span<double> out)>;

/// x^{n+1} = Proj_Q(x^n + dt V(x^n)), recorded every `stride` steps and at T.
/// Throws std::invalid_argument if x0 ∉ Q.
VectorTrajectory projected_euler(const BoxField& field, const Box& box, std::span<const double> x0,
                                 double dt, double T, std::size_t stride = 1);

/// Per-particle affine interpolation between the bracketing snapshots.
/// Throws std::out_of_range outside [t_0, t_last].
EnsemblePair interpolate(const EnsembleTrajectory& traj, double t);

/// Moves every discriminator particle by projected Euler under a synthetic
/// field and counts face-pinned coordinates after each step.
struct PinningRecord {
  std::vector<double> times;
  std::vector<std::size_t> pinned;
  EnsemblePair final_state;
};
PinningRecord flow_discriminators(const EnsemblePair& initial, const BoxField& field, double dt,
                                  double T);

struct CoupledRunSpec {
  Dims dims;
  std::size_t N = 100;
  std::size_t M = 100;
  SgdConfig sgd;
  MeanFieldConfig meanfield;
  InitDistribution init;
  TargetDistribution target = TargetDistribution::bimodal();
  Activation activation = Activation::sigmoid();
  std::uint64_t seed = 0;
  bool exact_d2 = false;  // also compute assignment-based d₂² (needs N, M ≤ kAssignmentCap)

  /// Requires dt = h/N and γ_c = n_c N/M.
  void validate() const;
};

/// SGD path and mean-field Euler path from the same sampled initialization.
/// e(t) = mean_i |θ̂_i − θ_i|² + mean_i |ω̂_i − ω_i|² on the shared grid t_n = n h/N.
struct CoupledSeries {
  std::vector<double> times;
  std::vector<double> coupling_cost;
  std::vector<double> exact_d2_sq;  // empty unless requested
};
CoupledSeries coupled_run(const CoupledRunSpec& spec);

}  // namespace wgmf
