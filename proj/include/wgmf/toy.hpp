#pragma once

#include <optional>
#include <vector>

#include "wgmf/dynamics.hpp"

namespace wgmf::toy {

// Bimodal toy problem: P_* = ½δ_{-1} + ½δ_{+1}, a threshold generator with
// parameter g (pushing P forward to Φ(g)δ_{-1} + (1 − Φ(g))δ_{+1}, Φ the
// logistic CDF) and a ReLU critic x ↦ (ωx)_+ with ω ∈ [-1, 1].

struct State {
  double g = 0.0;
  double omega = 0.0;
  double gamma_c = 1.0;
};

struct Velocity {
  double dg = 0.0;
  double domega = 0.0;
};

/// Logistic CDF of the latent prior.
double Phi(double g);

/// Ψ(ω, g) = (½ − Φ(g)) ω
double psi(double omega, double g);

/// ġ = −∂_gΨ = Φ'(g) ω,  ω̇ = γ_c ∂_ωΨ = γ_c (½ − Φ(g)).
Velocity field(const State& s);

/// E_{γ_c} = 2 cosh g + ω²/γ_c, conserved by the unconstrained flow.
double energy(const State& s);

/// E_*(γ_c) = 2 + 1/γ_c: the level set tangent to |ω| = 1.
double critical_energy(double gamma_c);

/// cosh⁻¹(1 + 1/(2γ_c)): amplitude of g on the limiting periodic orbit.
double limit_bound(double gamma_c);

/// d₁(G_g#P, P_*) = 2 |½ − Φ(g)| (two atoms at distance 2).
double w1(double g);

enum class Integrator { rk4, projected_euler };

struct Sample {
  double g;
  double omega;
  double energy;
};
using ToyTrajectory = Trajectory<Sample>;

/// Integrates the toy flow for T with step dt. When `constrained`, ω is
/// clamped to [-1, 1] after every step. Defaults: RK4 when unconstrained,
/// projected Euler when constrained. Throws std::invalid_argument when a
/// constrained run starts with |ω| > 1.
ToyTrajectory simulate(const State& s0, double dt, double T, bool constrained,
                       std::optional<Integrator> integrator = std::nullopt, std::size_t stride = 1);

struct PeriodEstimate {
  std::vector<double> crossing_times;
  std::vector<double> returns;  // successive differences of crossing_times
  double mean = 0.0;            // mean of all returns

  /// (max − min) / mean over the last k returns.
  double spread_last(std::size_t k) const;
};

/// Poincaré return times through the section ω = 0 crossed upward (so that
/// ġ > 0 right after the crossing). Crossing times are linearly interpolated.
/// Returns std::nullopt when fewer than two crossings exist.
std::optional<PeriodEstimate> detect_period(const ToyTrajectory& traj);

/// Points of the level set {E_{γ_c} = level}, upper branch then lower branch,
/// `samples` points each.
std::vector<std::pair<double, double>> level_set(double level, double gamma_c, std::size_t samples);

}  // namespace wgmf::toy
