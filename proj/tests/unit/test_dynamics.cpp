#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "support.hpp"
#include "wgmf/dynamics.hpp"
#include "wgmf/rate_fit.hpp"

using namespace wgmf;
using test::logistic;
using test::make_pair;

namespace {

double dlogistic(double u) { return logistic(u) * (1.0 - logistic(u)); }

bool same_values(const EnsemblePair& a, const EnsemblePair& b) {
  for (std::size_t i = 0; i < a.N(); ++i) {
    const auto x = a.generators()[i].values(), y = b.generators()[i].values();
    if (!std::equal(x.begin(), x.end(), y.begin())) return false;
  }
  for (std::size_t i = 0; i < a.M(); ++i) {
    const auto x = a.discriminators()[i].values(), y = b.discriminators()[i].values();
    if (!std::equal(x.begin(), x.end(), y.begin())) return false;
  }
  return true;
}

bool all_in_q(const EnsemblePair& e) {
  for (const auto& w : e.discriminators()) {
    for (double v : w.values()) {
      if (std::abs(v) > 1.0) return false;
    }
  }
  return true;
}

// One outer step for K = L = N = M = 1 with critic sub-steps at samples (z_l, x_l),
// written directly from the update formulas.
void hand_step(std::vector<double>& theta, std::vector<double>& omega, double h,
               const std::vector<std::pair<double, double>>& samples) {
  const double alpha = theta[0], beta = theta[1], gamma = theta[2];
  const double a0 = omega[0], b0 = omega[1], c0 = omega[2];
  for (const auto& [z, x] : samples) {
    const double G = alpha * logistic(beta * z + gamma);
    const double a = omega[0], b = omega[1], c = omega[2];
    const double v0 = logistic(b * G + c) - logistic(b * x + c);
    const double v1 = a * G * dlogistic(b * G + c) - a * x * dlogistic(b * x + c);
    const double v2 = a * dlogistic(b * G + c) - a * dlogistic(b * x + c);
    omega = {std::clamp(a + h * v0, -1.0, 1.0), std::clamp(b + h * v1, -1.0, 1.0), std::clamp(c + h * v2, -1.0, 1.0)};
  }
  const double z = samples.front().first;
  const double G = alpha * logistic(beta * z + gamma);
  const double grad = a0 * b0 * dlogistic(b0 * G + c0);
  const double u = beta * z + gamma;
  theta = {alpha - h * grad * logistic(u), beta - h * grad * alpha * z * dlogistic(u), gamma - h * grad * alpha * dlogistic(u)};
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("sgd with zero learning rate does nothing") {
    const auto e = sample_ensemble({2, 1}, 5, 5, InitDistribution{}, 1);
    SgdConfig cfg;
    cfg.h = 0.0;
    CHECK(same_values(sgd_step(e, cfg, TargetDistribution::atomic({{0.0, 1.0}}, {1.0}), 0), e));
  }

  TEST_CASE("silent critic leaves the generators in place") {
    const Dims d{1, 1};
    const auto e = make_pair(d, {{1.0, 0.5, 0.2}, {-0.4, 0.1, 0.3}}, {{0.0, 0.5, 0.1}, {0.0, -0.5, 0.3}});
    SgdConfig cfg;
    cfg.h = 0.5;
    const auto next = sgd_step(e, cfg, TargetDistribution::bimodal(), 3);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto a = e.generators()[i].values(), b = next.generators()[i].values();
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    CHECK(next.discriminators()[0].a() != 0.0);
  }

  TEST_CASE("single outer step against the hand-evaluated update") {
    const Dims d{1, 1};
    std::vector<double> theta{1.3, -0.6, 0.25}, omega{0.7, 0.8, -0.2};
    const auto e = make_pair(d, {theta}, {omega});
    const std::vector<SamplePair> samples{{{0.45}, {-1.0}}};
    const auto next = sgd_update(e, 0.3, samples);
    hand_step(theta, omega, 0.3, {{0.45, -1.0}});
    for (int l = 0; l < 3; ++l) {
      CHECK(next.generators()[0].values()[l] == doctest::Approx(theta[l]).epsilon(1e-14));
      CHECK(next.discriminators()[0].values()[l] == doctest::Approx(omega[l]).epsilon(1e-14));
    }
  }

  TEST_CASE("several critic sub-steps against the hand-evaluated update") {
    const Dims d{1, 1};
    std::vector<double> theta{-0.8, 1.1, 0.4}, omega{0.95, -0.9, 0.5};
    const auto e = make_pair(d, {theta}, {omega});
    const std::vector<SamplePair> samples{{{0.3}, {1.0}}, {{-1.7}, {-1.0}}, {{0.9}, {1.0}}};
    const auto next = sgd_update(e, 2.0, samples);
    hand_step(theta, omega, 2.0, {{0.3, 1.0}, {-1.7, -1.0}, {0.9, 1.0}});
    for (int l = 0; l < 3; ++l) {
      CHECK(next.generators()[0].values()[l] == doctest::Approx(theta[l]).epsilon(1e-14));
      CHECK(next.discriminators()[0].values()[l] == doctest::Approx(omega[l]).epsilon(1e-14));
    }
    CHECK(all_in_q(next));
  }

  TEST_CASE("sgd steps are deterministic and feasible") {
    const auto e = sample_ensemble({1, 1}, 20, 20, InitDistribution{}, 5);
    SgdConfig cfg;
    cfg.h = 5.0;
    cfg.n_c = 3;
    cfg.seed = 77;
    const auto target = TargetDistribution::bimodal();
    auto a = e, b = e;
    for (std::uint64_t n = 0; n < 50; ++n) {
      a = sgd_step(a, cfg, target, n);
      b = sgd_step(b, cfg, target, n);
      CHECK(all_in_q(a));
    }
    CHECK(same_values(a, b));
    CHECK(draw_sgd_samples(cfg, 1, target, 4).size() == 3);
    cfg.n_c = 0;
    CHECK_THROWS_AS(sgd_step(e, cfg, target, 0), std::invalid_argument);
  }

  TEST_CASE("mean-field step") {
    const auto target = TargetDistribution::bimodal();
    const auto e = sample_ensemble({1, 1}, 6, 4, InitDistribution{}, 8);
    MeanFieldConfig cfg;
    cfg.dt = 0.0;
    CHECK(same_values(meanfield_step(e, cfg, target), e));

    cfg.dt = 0.01;
    cfg.gamma_c = 2.0;
    const auto next = meanfield_step(e, cfg, target);
    const FieldEvaluator fields(e, target, cfg.quad);
    for (std::size_t i = 0; i < e.N(); ++i) {
      const auto v = fields.V_theta(e.generators()[i]);
      for (std::size_t l = 0; l < v.size(); ++l) {
        CHECK(next.generators()[i].values()[l] == doctest::Approx(e.generators()[i].values()[l] + 0.01 * v[l]).epsilon(1e-15));
      }
    }
    for (std::size_t i = 0; i < e.M(); ++i) {
      const auto v = fields.V_omega(e.discriminators()[i]);
      for (std::size_t l = 0; l < v.size(); ++l) {
        const double expected = std::clamp(e.discriminators()[i].values()[l] + 0.02 * v[l], -1.0, 1.0);
        CHECK(next.discriminators()[i].values()[l] == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("outward critic field pins the particle at the face") {
    // G ≡ 1/2 and P_* = δ_{-1}: V^Ω_a = σ(1/2) − σ(−1) > 0 at a = 1.
    const auto e = make_pair({1, 1}, {{1.0, 0.0, 0.0}}, {{1.0, 1.0, 0.0}});
    MeanFieldConfig cfg;
    cfg.dt = 0.1;
    const auto next = meanfield_step(e, cfg, TargetDistribution::atomic({{-1.0}}, {1.0}));
    CHECK(next.discriminators()[0].a() == 1.0);
    CHECK(next.discriminators()[0].b()[0] == 1.0);
  }

  TEST_CASE("mean-field step has second-order local error in the interior") {
    InitDistribution init;
    init.a = init.b = init.c = {CoordinateLaw::Kind::uniform, -0.5, 0.5};
    const auto e = sample_ensemble({1, 1}, 2, 2, init, 3);
    const auto target = TargetDistribution::bimodal();
    auto local_error = [&](double dt) {
      MeanFieldConfig one;
      one.dt = dt;
      const auto coarse = meanfield_step(e, one, target);
      MeanFieldConfig fine;
      fine.dt = dt / 1000.0;
      auto ref = e;
      for (int n = 0; n < 1000; ++n) ref = meanfield_step(ref, fine, target);
      double err = 0.0;
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t l = 0; l < 3; ++l) {
          err = std::max(err, std::abs(coarse.generators()[i].values()[l] - ref.generators()[i].values()[l]));
          err = std::max(err, std::abs(coarse.discriminators()[i].values()[l] - ref.discriminators()[i].values()[l]));
        }
      }
      return err;
    };
    const double e1 = local_error(0.2), e2 = local_error(0.1), e3 = local_error(0.05);
    CHECK(e1 / e2 > 3.5);
    CHECK(e2 / e3 > 3.5);
    CHECK(e3 <= 0.05 * 0.05);
  }

  TEST_CASE("projected Euler basics") {
    const Box q = Box::unit(2);
    const BoxField zero = [](std::span<const double>, std::span<double> v) { v[0] = v[1] = 0.0; };
    const auto still = projected_euler(zero, q, std::vector<double>{0.3, -0.2}, 0.1, 1.0);
    for (const auto& s : still.states()) CHECK(s == std::vector<double>{0.3, -0.2});

    const BoxField push = [](std::span<const double>, std::span<double> v) { v[0] = 1.0; v[1] = 0.0; };
    const auto traj = projected_euler(push, q, std::vector<double>{0.0, 0.5}, 0.01, 3.0);
    for (std::size_t n = 0; n < traj.size(); ++n) {
      const double t = traj.times()[n];
      if (t > 1.0 + 1e-9) CHECK(traj.states()[n] == std::vector<double>{1.0, 0.5});
      CHECK(q.contains(traj.states()[n]));
    }
    CHECK_THROWS_AS(projected_euler(zero, q, std::vector<double>{1.5, 0.0}, 0.1, 1.0), std::invalid_argument);
  }

  TEST_CASE("projected Euler converges at first order before boundary contact") {
    const Box q = Box::unit(2);
    const BoxField rotation = [](std::span<const double> x, std::span<double> v) { v[0] = -x[1]; v[1] = x[0]; };
    std::vector<double> dts{1e-2, 5e-3, 2.5e-3, 1.25e-3}, errs;
    for (double dt : dts) {
      const auto traj = projected_euler(rotation, q, std::vector<double>{0.5, 0.0}, dt, 3.0);
      double err = 0.0;
      for (std::size_t n = 0; n < traj.size(); ++n) {
        const double t = traj.times()[n];
        err = std::max(err, std::hypot(traj.states()[n][0] - 0.5 * std::cos(t), traj.states()[n][1] - 0.5 * std::sin(t)));
      }
      errs.push_back(err);
    }
    CHECK(fit_rate(dts, errs).slope >= 1.0);
  }

  TEST_CASE("trajectory times must increase") {
    VectorTrajectory t;
    t.push(0.0, {1.0});
    t.push(0.5, {2.0});
    CHECK_THROWS_AS(t.push(0.5, {3.0}), std::logic_error);
  }

  TEST_CASE("interpolation between snapshots") {
    const auto target = TargetDistribution::bimodal();
    const auto e = sample_ensemble({1, 1}, 3, 3, InitDistribution{}, 2);
    MeanFieldConfig cfg;
    cfg.dt = 0.5;
    cfg.horizon = 2.0;
    cfg.gamma_c = 40.0;
    const auto rec = run_meanfield(e, cfg, target, 1);
    const auto& snaps = rec.snapshots;
    REQUIRE(snaps.size() == 5);
    CHECK(same_values(interpolate(snaps, 1.0), snaps.states()[2]));
    const auto mid = interpolate(snaps, 1.25);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t l = 0; l < 3; ++l) {
        const double g = 0.5 * (snaps.states()[2].generators()[i].values()[l] + snaps.states()[3].generators()[i].values()[l]);
        CHECK(mid.generators()[i].values()[l] == doctest::Approx(g).epsilon(1e-15));
        const double w = 0.5 * (snaps.states()[2].discriminators()[i].values()[l] + snaps.states()[3].discriminators()[i].values()[l]);
        CHECK(mid.discriminators()[i].values()[l] == doctest::Approx(w).epsilon(1e-15));
      }
    }
    for (double t = 0.0; t <= 2.0; t += 0.05) CHECK(all_in_q(interpolate(snaps, t)));
    CHECK_THROWS_AS(interpolate(snaps, 2.1), std::out_of_range);
    CHECK_THROWS_AS(interpolate(snaps, -0.1), std::out_of_range);
  }

  TEST_CASE("alpha growth stays within the linear bound") {
    const auto target = TargetDistribution::bimodal();
    for (int K : {1, 2}) {
      const auto t2 = K == 1 ? target : TargetDistribution::atomic({{-1.0, 1.0}, {1.0, 0.0}}, {0.5, 0.5});
      const auto e = sample_ensemble({K, 1}, 10, 10, InitDistribution{}, 21);
      MeanFieldConfig cfg;
      cfg.dt = 0.01;
      cfg.horizon = 3.0;
      const auto rec = run_meanfield(e, cfg, t2);
      for (const auto& d : rec.diagnostics) CHECK(d.max_alpha_growth <= std::sqrt(static_cast<double>(K)) * d.t + 1e-12);
    }
  }

  TEST_CASE("runs keep discriminators feasible and snapshot on the stride") {
    const auto target = TargetDistribution::bimodal();
    const auto e = sample_ensemble({1, 1}, 8, 8, InitDistribution{}, 4);
    SgdConfig cfg;
    cfg.h = 4.0;
    cfg.steps = 25;
    cfg.seed = 3;
    const auto rec = run_sgd(e, cfg, target, Quadrature{}, 10);
    CHECK(rec.diagnostics.size() == 26);
    CHECK(rec.snapshots.size() == 4);
    CHECK(rec.snapshots.times().back() == doctest::Approx(25 * 0.5));
    for (const auto& s : rec.snapshots.states()) CHECK(all_in_q(s));
  }

  TEST_CASE("constant outward field flattens the support") {
    const auto e = sample_ensemble({1, 1}, 1, 50, InitDistribution{}, 6);
    const BoxField out = [](std::span<const double>, std::span<double> v) { v[0] = 0.5; v[1] = 0.0; v[2] = -0.5; };
    const double t_pin = 2.0 * Box::unit(3).diameter() / std::sqrt(0.5);
    const auto rec = flow_discriminators(e, out, 0.01, 2.0 * t_pin);
    for (std::size_t n = 0; n < rec.times.size(); ++n) {
      if (rec.times[n] >= t_pin) CHECK(rec.pinned[n] == 100);
    }
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(rec.final_state.discriminators()[i].a() == 1.0);
      CHECK(rec.final_state.discriminators()[i].c() == -1.0);
      CHECK(rec.final_state.discriminators()[i].b()[0] == e.discriminators()[i].b()[0]);
    }
  }

  TEST_CASE("coupled runs") {
    CoupledRunSpec spec;
    spec.dims = {1, 1};
    spec.N = spec.M = 10;
    spec.sgd.h = 0.5;
    spec.meanfield.dt = 0.05;
    spec.meanfield.horizon = 1.0;
    spec.seed = 12;
    const auto a = coupled_run(spec);
    const auto b = coupled_run(spec);
    CHECK(a.coupling_cost == b.coupling_cost);
    CHECK(a.times.size() == 21);
    CHECK(a.coupling_cost.front() == 0.0);
    CHECK(a.coupling_cost.back() > 0.0);
    CHECK(a.times.back() == doctest::Approx(1.0));

    spec.exact_d2 = true;
    const auto c = coupled_run(spec);
    REQUIRE(c.exact_d2_sq.size() == c.coupling_cost.size());
    for (std::size_t n = 0; n < c.times.size(); ++n) CHECK(c.exact_d2_sq[n] <= c.coupling_cost[n] + 1e-14);

    auto still = spec;
    still.sgd.h = 0.0;
    still.meanfield.dt = 0.0;
    for (double e : coupled_run(still).coupling_cost) CHECK(e == 0.0);

    auto bad = spec;
    bad.meanfield.dt = 0.04;
    CHECK_THROWS_AS(coupled_run(bad), std::invalid_argument);
    bad = spec;
    bad.sgd.n_c = 2;
    CHECK_THROWS_AS(coupled_run(bad), std::invalid_argument);
    bad.meanfield.gamma_c = 2.0;
    CHECK_NOTHROW(bad.validate());
    bad = spec;
    bad.M = 5;
    bad.meanfield.gamma_c = 2.0;
    CHECK_NOTHROW(bad.validate());
  }
}
