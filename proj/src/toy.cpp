#include "wgmf/toy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wgmf/activation.hpp"

namespace wgmf::toy {

double Phi(double g) { return sigmoid(g); }

double psi(double omega, double g) { return (0.5 - Phi(g)) * omega; }

Velocity field(const State& s) {
  const double phi = Phi(s.g);
  return {phi * (1.0 - phi) * s.omega, s.gamma_c * (0.5 - phi)};
}

double energy(const State& s) { return 2.0 * std::cosh(s.g) + s.omega * s.omega / s.gamma_c; }

double critical_energy(double gamma_c) { return 2.0 + 1.0 / gamma_c; }

double limit_bound(double gamma_c) {
  if (!(gamma_c > 0.0)) throw std::invalid_argument("limit_bound: gamma_c must be > 0");
  if (std::isinf(gamma_c)) return 0.0;
  return std::acosh(1.0 + 1.0 / (2.0 * gamma_c));
}

double w1(double g) { return 2.0 * std::abs(0.5 - Phi(g)); }

namespace {

State advance_rk4(const State& s, double dt) {
  const auto at = [&](double g, double w) { return field({g, w, s.gamma_c}); };
  const Velocity k1 = at(s.g, s.omega);
  const Velocity k2 = at(s.g + 0.5 * dt * k1.dg, s.omega + 0.5 * dt * k1.domega);
  const Velocity k3 = at(s.g + 0.5 * dt * k2.dg, s.omega + 0.5 * dt * k2.domega);
  const Velocity k4 = at(s.g + dt * k3.dg, s.omega + dt * k3.domega);
  return {s.g + dt / 6.0 * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg),
          s.omega + dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega),
          s.gamma_c};
}

State advance_euler(const State& s, double dt) {
  const Velocity v = field(s);
  return {s.g + dt * v.dg, s.omega + dt * v.domega, s.gamma_c};
}

}  // namespace

ToyTrajectory simulate(const State& s0, double dt, double T, bool constrained,
                       std::optional<Integrator> integrator, std::size_t stride) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("toy.simulate: need dt > 0, T >= 0");
  if (!(s0.gamma_c > 0.0)) throw std::invalid_argument("toy.gamma_c: must be > 0");
  if (constrained && std::abs(s0.omega) > 1.0) {
    throw std::invalid_argument("toy.omega: constrained run must start with |omega| <= 1");
  }
  const Integrator scheme =
      integrator.value_or(constrained ? Integrator::projected_euler : Integrator::rk4);
  stride = std::max<std::size_t>(stride, 1);
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));

  ToyTrajectory traj;
  State s = s0;
  traj.push(0.0, {s.g, s.omega, energy(s)});
  for (std::size_t n = 1; n <= steps; ++n) {
    s = scheme == Integrator::rk4 ? advance_rk4(s, dt) : advance_euler(s, dt);
    if (constrained) s.omega = std::clamp(s.omega, -1.0, 1.0);
    if (n % stride == 0 || n == steps) traj.push(static_cast<double>(n) * dt, {s.g, s.omega, energy(s)});
  }
  return traj;
}

double PeriodEstimate::spread_last(std::size_t k) const {
  if (returns.empty()) return std::numeric_limits<double>::infinity();
  k = std::min(k, returns.size());
  const auto first = returns.end() - static_cast<std::ptrdiff_t>(k);
  const auto [lo, hi] = std::minmax_element(first, returns.end());
  double mean = 0.0;
  for (auto it = first; it != returns.end(); ++it) mean += *it;
  mean /= static_cast<double>(k);
  return (*hi - *lo) / mean;
}

std::optional<PeriodEstimate> detect_period(const ToyTrajectory& traj) {
  PeriodEstimate est;
  const auto& t = traj.times();
  const auto& s = traj.states();
  for (std::size_t n = 0; n + 1 < s.size(); ++n) {
    const double w0 = s[n].omega;
    const double w1 = s[n + 1].omega;
    if (w0 < 0.0 && w1 >= 0.0) {
      const double frac = -w0 / (w1 - w0);
      est.crossing_times.push_back(t[n] + frac * (t[n + 1] - t[n]));
    }
  }
  if (est.crossing_times.size() < 2) return std::nullopt;
  for (std::size_t k = 1; k < est.crossing_times.size(); ++k) {
    est.returns.push_back(est.crossing_times[k] - est.crossing_times[k - 1]);
  }
  for (double r : est.returns) est.mean += r;
  est.mean /= static_cast<double>(est.returns.size());
  return est;
}

std::vector<std::pair<double, double>> level_set(double level, double gamma_c, std::size_t samples) {
  if (!(level >= 2.0)) throw std::invalid_argument("level_set: energy level must be >= 2");
  if (samples < 2) throw std::invalid_argument("level_set: need at least two samples");
  const double gmax = std::acosh(level / 2.0);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(2 * samples);
  for (int branch : {1, -1}) {
    for (std::size_t k = 0; k < samples; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(samples - 1);
      const double g = branch > 0 ? -gmax + 2.0 * gmax * u : gmax - 2.0 * gmax * u;
      const double rest = std::max(0.0, level - 2.0 * std::cosh(g));
      pts.emplace_back(g, branch * std::sqrt(gamma_c * rest));
    }
  }
  return pts;
}

}  // namespace wgmf::toy
