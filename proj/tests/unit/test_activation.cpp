#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "support.hpp"
#include "wgmf/activation.hpp"

using namespace wgmf;

TEST_SUITE("activation") {
  TEST_CASE("sigmoid symmetry and derivative identity") {
    const auto s = Activation::sigmoid();
    CHECK(s(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double u = -40.0; u <= 40.0; u += 0.37) {
      CHECK(std::abs(s(u) + s(-u) - 1.0) <= 1e-12);
      CHECK(std::abs(s.first_derivative(u) - s(u) * (1.0 - s(u))) <= 1e-12);
    }
  }

  TEST_CASE("sigmoid matches the textbook formula") {
    for (double u = -20.0; u <= 20.0; u += 0.5) CHECK(Activation::sigmoid()(u) == doctest::Approx(test::logistic(u)));
  }

  TEST_CASE("no overflow at extreme arguments") {
    const auto s = Activation::sigmoid();
    CHECK(s(-800.0) >= 0.0);
    CHECK(s(800.0) == 1.0);
    CHECK(std::isfinite(s.first_derivative(-800.0)));
    CHECK(std::isfinite(s.second_derivative(800.0)));
  }

  TEST_CASE("derivatives agree with central differences") {
    for (const auto& act : {Activation::sigmoid(), Activation::tanh()}) {
      const double h = 1e-5;
      for (double u = -6.0; u <= 6.0; u += 0.25) {
        const double d1 = (act(u + h) - act(u - h)) / (2 * h);
        const double d2 = (act.first_derivative(u + h) - act.first_derivative(u - h)) / (2 * h);
        CHECK(act.first_derivative(u) == doctest::Approx(d1).epsilon(1e-8));
        CHECK(act.second_derivative(u) == doctest::Approx(d2).epsilon(1e-6).scale(1e-3));
      }
    }
  }

  TEST_CASE("c2 bound dominates value and derivatives") {
    for (const auto& act : {Activation::sigmoid(), Activation::tanh()}) {
      for (double u = -30.0; u <= 30.0; u += 0.01) {
        CHECK(std::abs(act(u)) <= act.c2_bound());
        CHECK(std::abs(act.first_derivative(u)) <= act.c2_bound());
        CHECK(std::abs(act.second_derivative(u)) <= act.c2_bound());
      }
    }
  }

  TEST_CASE("lookup by name") {
    CHECK(Activation::by_name("sigmoid").name() == "sigmoid");
    CHECK(Activation::by_name("tanh")(0.3) == doctest::Approx(std::tanh(0.3)));
    CHECK_THROWS_AS(Activation::by_name("relu"), std::invalid_argument);
  }
}
