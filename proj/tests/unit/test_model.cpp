#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "support.hpp"
#include "wgmf/model.hpp"
#include "wgmf/rng.hpp"

using namespace wgmf;
using test::make_pair;

TEST_SUITE("model") {
  TEST_CASE("dimensions") {
    const Dims d{3, 2};
    CHECK(d.generator_size() == 12);
    CHECK(d.discriminator_size() == 5);
    const GeneratorParticle g(d, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    CHECK(g.alpha(1) == 5);
    CHECK(g.beta(1)[0] == 6);
    CHECK(g.beta(1)[1] == 7);
    CHECK(g.gamma(1) == 8);
    CHECK_THROWS_AS(GeneratorParticle(d, {1, 2}), std::invalid_argument);
  }

  TEST_CASE("discriminator particles live in Q") {
    CHECK_NOTHROW(DiscriminatorParticle(1, {1.0, -1.0, 0.3}));
    CHECK_THROWS_AS(DiscriminatorParticle(1, {1.5, 0.0, 0.0}), std::invalid_argument);
    const auto p = DiscriminatorParticle::projected(1, {1.5, -3.0, 0.2});
    CHECK(p.a() == 1.0);
    CHECK(p.b()[0] == -1.0);
    CHECK(p.c() == 0.2);
  }

  TEST_CASE("generator_eval examples") {
    const Dims d{1, 1};
    const std::vector<double> z{0.7};
    CHECK(generator_eval(make_pair(d, {{0, 0.3, 0.2}}, {{0, 0, 0}}), z)[0] == 0.0);
    CHECK(generator_eval(make_pair(d, {{1, 0, 0}}, {{0, 0, 0}}), z)[0] == doctest::Approx(0.5));
    CHECK(generator_eval(make_pair(d, {{1, 0, 0}, {-1, 0, 0}}, {{0, 0, 0}}), z)[0] == doctest::Approx(0.0));
  }

  TEST_CASE("generator_eval hand value") {
    const Dims d{2, 1};
    const auto e = make_pair(d, {{2.0, 0.5, -0.1, -1.0, 1.5, 0.3}}, {{0, 0, 0, 0}});
    const auto G = generator_eval(e, std::vector<double>{0.4});
    CHECK(G[0] == doctest::Approx(2.0 * test::logistic(0.5 * 0.4 - 0.1)));
    CHECK(G[1] == doctest::Approx(-1.0 * test::logistic(1.5 * 0.4 + 0.3)));
  }

  TEST_CASE("discriminator_eval examples") {
    const Dims d{1, 1};
    const std::vector<double> x{0.3};
    CHECK(discriminator_eval(make_pair(d, {{1, 0, 0}}, {{0, 0.5, 0.5}}), x) == 0.0);
    CHECK(discriminator_eval(make_pair(d, {{1, 0, 0}}, {{1, 0, 0}}), x) == doctest::Approx(0.5));
    const auto sat = make_pair(d, {{1, 0, 0}}, {{1, 1, 0}});
    CHECK(discriminator_eval(sat, std::vector<double>{50.0}) == doctest::Approx(1.0));
    CHECK(discriminator_eval(sat, std::vector<double>{10.0}) < discriminator_eval(sat, std::vector<double>{20.0}));
  }

  TEST_CASE("duplicating every particle leaves the networks unchanged") {
    const Dims d{2, 2};
    const auto e = sample_ensemble(d, 5, 4, InitDistribution{}, 11);
    auto gens = e.generators();
    auto discs = e.discriminators();
    gens.insert(gens.end(), e.generators().begin(), e.generators().end());
    discs.insert(discs.end(), e.discriminators().begin(), e.discriminators().end());
    const EnsemblePair twice(d, gens, discs);
    const std::vector<double> z{0.3, -1.2}, x{0.5, -0.25};
    const auto g1 = generator_eval(e, z), g2 = generator_eval(twice, z);
    CHECK(g1[0] == doctest::Approx(g2[0]).epsilon(1e-14));
    CHECK(g1[1] == doctest::Approx(g2[1]).epsilon(1e-14));
    CHECK(discriminator_eval(e, x) == doctest::Approx(discriminator_eval(twice, x)).epsilon(1e-14));
  }

  TEST_CASE("generator bound and discriminator Lipschitz bound on random instances") {
    RngStream rng(3);
    InitDistribution init;
    init.alpha = {CoordinateLaw::Kind::uniform, -3.0, 3.0};
    init.beta = {CoordinateLaw::Kind::uniform, -2.0, 2.0};
    for (int k = 0; k < 10000; ++k) {
      const Dims d{1 + static_cast<int>(rng.uniform01() * 3), 1 + static_cast<int>(rng.uniform01() * 2)};
      const auto e = sample_ensemble(d, 3, 3, init, static_cast<std::uint64_t>(k));
      const auto z = sample_latent(d.L, rng);
      const auto G = generator_eval(e, z);
      for (int j = 0; j < d.K; ++j) {
        double mean_abs = 0.0;
        for (const auto& g : e.generators()) mean_abs += std::abs(g.alpha(j));
        mean_abs /= 3.0;
        CHECK(std::abs(G[j]) <= e.activation().c2_bound() * mean_abs + 1e-15);
      }
      std::vector<double> x(d.K), y(d.K);
      double dist2 = 0.0;
      for (int j = 0; j < d.K; ++j) {
        x[j] = rng.uniform(-3, 3);
        y[j] = rng.uniform(-3, 3);
        dist2 += (x[j] - y[j]) * (x[j] - y[j]);
      }
      const double q = std::abs(discriminator_eval(e, x) - discriminator_eval(e, y)) / std::sqrt(dist2);
      CHECK(q <= e.activation().c2_bound() * std::sqrt(static_cast<double>(d.K)) + 1e-12);
      CHECK(std::abs(discriminator_eval(e, x)) <= e.activation().c2_bound());
    }
  }

  TEST_CASE("target sampling") {
    RngStream rng(17);
    const auto bimodal = TargetDistribution::bimodal();
    int plus = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      const double x = sample_target(bimodal, rng)[0];
      REQUIRE((x == 1.0 || x == -1.0));
      plus += x > 0;
    }
    CHECK(std::abs(static_cast<double>(plus) / n - 0.5) <= 0.002);

    const auto single = TargetDistribution::atomic({{0.25, -2.0}}, {1.0});
    for (int i = 0; i < 100; ++i) CHECK(sample_target(single, rng) == std::vector<double>{0.25, -2.0});
  }

  TEST_CASE("gaussian mixture moments") {
    const auto gm = TargetDistribution::gaussian_mixture({{-2.0, 0.0}, {3.0, 1.0}}, {{1.0, 0.5, 0.5, 2.0}, {0.25, 0.0, 0.0, 0.25}},
                                                         {0.25, 0.75});
    RngStream rng(8);
    const int n = 400000;
    double m0 = 0.0, m1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto x = gm.sample(rng);
      m0 += x[0];
      m1 += x[1];
    }
    CHECK(m0 / n == doctest::Approx(0.25 * -2.0 + 0.75 * 3.0).epsilon(0.01));
    CHECK(m1 / n == doctest::Approx(0.75).epsilon(0.01));
  }

  TEST_CASE("target validation") {
    CHECK_THROWS_AS(TargetDistribution::atomic({{0.0}, {1.0}}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(TargetDistribution::atomic({{0.0}, {1.0}}, {1.5, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(TargetDistribution::atomic({{0.0}, {1.0, 2.0}}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(TargetDistribution::gaussian_mixture({{0.0}}, {{-1.0}}, {1.0}), std::invalid_argument);
    CHECK_NOTHROW(TargetDistribution::atomic({{0.0}, {1.0}}, {0.5, 0.5 + 1e-13}));
  }

  TEST_CASE("initialization") {
    InitDistribution init;
    const Dims d{2, 3};
    const auto a = sample_ensemble(d, 20, 15, init, 99);
    const auto b = sample_ensemble(d, 20, 15, init, 99);
    CHECK(a.N() == 20);
    CHECK(a.M() == 15);
    for (std::size_t i = 0; i < a.N(); ++i) {
      const auto va = a.generators()[i].values(), vb = b.generators()[i].values();
      CHECK(std::equal(va.begin(), va.end(), vb.begin()));
    }
    for (const auto& w : a.discriminators()) {
      for (double v : w.values()) CHECK(std::abs(v) <= 1.0);
    }
    // particle i only depends on its own substream
    const auto bigger = sample_ensemble(d, 40, 15, init, 99);
    const auto v0 = a.generators()[7].values(), v1 = bigger.generators()[7].values();
    CHECK(std::equal(v0.begin(), v0.end(), v1.begin()));

    init.a = {CoordinateLaw::Kind::uniform, -2.0, 2.0};
    CHECK_THROWS_AS(init.validate(), std::invalid_argument);
  }

  TEST_CASE("truncated normal coordinate law") {
    CoordinateLaw law{CoordinateLaw::Kind::truncated_normal, -0.5, 1.0, 0.8, 2.0};
    RngStream rng(4);
    for (int i = 0; i < 10000; ++i) {
      const double v = law.sample(rng);
      CHECK(v >= -0.5);
      CHECK(v <= 1.0);
    }
    law.stddev = 0.0;
    CHECK_THROWS_AS(law.validate("alpha"), std::invalid_argument);
  }
}
