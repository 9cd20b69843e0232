#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "wgmf/rng.hpp"
#include "wgmf/toy.hpp"
#include "wgmf/transport.hpp"

using namespace wgmf;

namespace {

double max_abs_g_after(const toy::ToyTrajectory& traj, double t0) {
  double m = 0.0;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    if (traj.times()[n] > t0) m = std::max(m, std::abs(traj.states()[n].g));
  }
  return m;
}

toy::ToyTrajectory tail(const toy::ToyTrajectory& traj, double t0) {
  toy::ToyTrajectory out;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    if (traj.times()[n] > t0) out.push(traj.times()[n], traj.states()[n]);
  }
  return out;
}

}  // namespace

TEST_SUITE("toy") {
  TEST_CASE("joint dependence function") {
    for (double w : {-1.0, -0.3, 0.0, 0.8}) CHECK(toy::psi(w, 0.0) == 0.0);
    for (double g : {-3.0, 0.5, 7.0}) CHECK(toy::psi(0.0, g) == 0.0);
    CHECK(toy::psi(1.0, 40.0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(toy::psi(0.6, 1.2) == doctest::Approx((0.5 - 1.0 / (1.0 + std::exp(-1.2))) * 0.6));
  }

  TEST_CASE("field examples and symmetry") {
    CHECK(toy::field({0.0, 0.7, 3.0}).domega == 0.0);
    const auto v = toy::field({0.0, 1.0, 1.0});
    CHECK(v.dg == doctest::Approx(0.25).epsilon(1e-15));
    RngStream rng(1);
    for (int k = 0; k < 1000; ++k) {
      const toy::State s{rng.uniform(-5, 5), rng.uniform(-1, 1), rng.uniform(0.1, 10)};
      const auto a = toy::field(s), b = toy::field({-s.g, -s.omega, s.gamma_c});
      CHECK(b.dg == doctest::Approx(-a.dg).epsilon(1e-12));
      CHECK(b.domega == doctest::Approx(-a.domega).epsilon(1e-12));
    }
  }

  TEST_CASE("field is descent in g and scaled ascent in omega of psi") {
    RngStream rng(2);
    const double h = 1e-5;
    for (int k = 0; k < 10000; ++k) {
      const toy::State s{rng.uniform(-4, 4), rng.uniform(-1, 1), rng.uniform(0.1, 10)};
      const double dg = -(toy::psi(s.omega, s.g + h) - toy::psi(s.omega, s.g - h)) / (2 * h);
      const double dw = s.gamma_c * (toy::psi(s.omega + h, s.g) - toy::psi(s.omega - h, s.g)) / (2 * h);
      const auto v = toy::field(s);
      CHECK(std::abs(v.dg - dg) <= 1e-8 * std::max(std::abs(dg), 1e-3));
      CHECK(std::abs(v.domega - dw) <= 1e-8 * std::max(std::abs(dw), 1e-3));
    }
  }

  TEST_CASE("the origin is the only rest point") {
    const auto v0 = toy::field({0.0, 0.0, 1.0});
    CHECK(v0.dg == 0.0);
    CHECK(v0.domega == 0.0);
    for (double g = -3.0; g <= 3.0; g += 0.01) {
      for (double w = -1.0; w <= 1.0; w += 0.01) {
        if (std::hypot(g, w) < 1e-6) continue;
        const auto v = toy::field({g, w, 1.0});
        CHECK(std::hypot(v.dg, v.domega) > 0.0);
      }
    }
  }

  TEST_CASE("energy and critical level") {
    CHECK(toy::energy({0.0, 0.0, 1.0}) == 2.0);
    CHECK(toy::energy({1.0, 0.5, 1.0}) == doctest::Approx(3.33616).epsilon(1e-6));
    CHECK(toy::critical_energy(1.0) == 3.0);
    CHECK(toy::critical_energy(10.0) == doctest::Approx(2.1));
  }

  TEST_CASE("limit bound") {
    CHECK(toy::limit_bound(1.0) == doctest::Approx(0.9624).epsilon(1e-4));
    CHECK(toy::limit_bound(10.0) == doctest::Approx(0.3149).epsilon(1e-4));
    CHECK(toy::limit_bound(1e12) < 1e-5);
    CHECK(toy::limit_bound(INFINITY) == 0.0);
    for (double gc : {0.5, 1.0, 10.0}) CHECK(2.0 * std::cosh(toy::limit_bound(gc)) == doctest::Approx(toy::critical_energy(gc)));
  }

  TEST_CASE("unconstrained flow conserves energy") {
    const toy::State s0{1.0, 0.5, 1.0};
    const auto traj = toy::simulate(s0, 1e-3, 50.0, false);
    const double e0 = toy::energy(s0);
    double drift = 0.0;
    for (const auto& s : traj.states()) drift = std::max(drift, std::abs(s.energy - e0) / e0);
    CHECK(drift <= 1e-4);
    CHECK(traj.times().back() == doctest::Approx(50.0));
  }

  TEST_CASE("constrained flow from above the critical level") {
    for (double gc : {1.0, 10.0}) {
      const toy::State s0{1.5, 0.5, gc};
      REQUIRE(toy::energy(s0) > toy::critical_energy(gc));
      const auto traj = toy::simulate(s0, 1e-3, 300.0, true);
      bool touched = false;
      for (std::size_t n = 0; n < traj.size(); ++n) {
        const auto& s = traj.states()[n];
        CHECK(std::abs(s.omega) <= 1.0);
        touched = touched || std::abs(s.omega) == 1.0;
        // clamped steps shrink |g|, unless the step jumps across g = 0
        const auto& prev = traj.states()[std::max<std::size_t>(n, 1) - 1];
        if (n > 0 && std::abs(s.omega) == 1.0 && std::abs(prev.omega) == 1.0 && s.g * prev.g > 0.0) {
          CHECK(s.energy <= prev.energy);
        }
      }
      CHECK(touched);
      CHECK(max_abs_g_after(traj, 150.0) <= toy::limit_bound(gc) + 0.01);
      CHECK(traj.states().back().energy == doctest::Approx(toy::critical_energy(gc)).epsilon(1e-3));
    }
  }

  TEST_CASE("below the critical level the constraint is inactive") {
    for (const toy::State s0 : {toy::State{0.5, 0.3, 1.0}, toy::State{0.2, -0.2, 10.0}, toy::State{-0.9, 0.0, 1.0}}) {
      REQUIRE(toy::energy(s0) <= toy::critical_energy(s0.gamma_c));
      for (auto integ : {toy::Integrator::rk4, toy::Integrator::projected_euler}) {
        const auto a = toy::simulate(s0, 1e-3, 40.0, true, integ);
        const auto b = toy::simulate(s0, 1e-3, 40.0, false, integ);
        REQUIRE(a.size() == b.size());
        double diff = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) {
          diff = std::max(diff, std::abs(a.states()[n].g - b.states()[n].g));
          diff = std::max(diff, std::abs(a.states()[n].omega - b.states()[n].omega));
        }
        CHECK(diff <= 1e-9);
      }
    }
  }

  TEST_CASE("infeasible constrained start") {
    CHECK_THROWS_AS(toy::simulate({0.0, 1.5, 1.0}, 1e-3, 1.0, true), std::invalid_argument);
    CHECK_NOTHROW(toy::simulate({0.0, 1.5, 1.0}, 1e-3, 1.0, false));
  }

  TEST_CASE("period detection") {
    const auto closed = toy::simulate({1.0, 0.5, 1.0}, 1e-3, 200.0, false);
    const auto est = toy::detect_period(closed);
    REQUIRE(est.has_value());
    REQUIRE(est->returns.size() >= 3);
    CHECK(est->spread_last(est->returns.size()) < 0.01);

    const auto constrained = toy::simulate({1.5, 0.5, 10.0}, 1e-3, 300.0, true);
    const auto late = toy::detect_period(tail(constrained, 150.0));
    REQUIRE(late.has_value());
    REQUIRE(late->returns.size() >= 5);
    CHECK(late->spread_last(5) < 0.01);

    CHECK_FALSE(toy::detect_period(toy::simulate({0.0, 0.0, 1.0}, 1e-3, 20.0, false)).has_value());
  }

  TEST_CASE("w1 closed form and sampled cross-check") {
    CHECK(toy::w1(0.0) == 0.0);
    CHECK(toy::w1(60.0) == doctest::Approx(1.0));
    RngStream rng(3);
    const std::size_t n = 10000;
    for (double g : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      std::vector<double> gen(n), target(n);
      for (std::size_t i = 0; i < n; ++i) {
        gen[i] = rng.uniform01() < toy::Phi(g) ? -1.0 : 1.0;
        target[i] = i < n / 2 ? -1.0 : 1.0;
      }
      const double emp = wasserstein_1d(1.0, PointCloud::line(gen), PointCloud::line(target));
      CHECK(std::abs(emp - toy::w1(g)) <= 2.0 / std::sqrt(static_cast<double>(n)));
    }
  }

  TEST_CASE("level sets lie on the energy contour") {
    for (double level : {2.1, 3.0, 5.0}) {
      const auto pts = toy::level_set(level, 1.0, 100);
      CHECK(pts.size() == 200);
      for (const auto& [g, w] : pts) CHECK(toy::energy({g, w, 1.0}) == doctest::Approx(level).epsilon(1e-9));
    }
    CHECK_THROWS_AS(toy::level_set(1.5, 1.0, 10), std::invalid_argument);
  }

  TEST_CASE("stride keeps the endpoint") {
    const auto traj = toy::simulate({1.0, 0.5, 1.0}, 1e-2, 1.0, false, std::nullopt, 30);
    CHECK(traj.size() == 5);
    CHECK(traj.times().back() == doctest::Approx(1.0));
  }
}
