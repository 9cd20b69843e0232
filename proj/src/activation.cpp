#include "wgmf/activation.hpp"

#include <stdexcept>

namespace wgmf {
namespace {

double sigmoid_d1(double u) {
  const double s = sigmoid(u);
  return s * (1.0 - s);
}

double sigmoid_d2(double u) {
  const double s = sigmoid(u);
  return s * (1.0 - s) * (1.0 - 2.0 * s);
}

double tanh_value(double u) { return std::tanh(u); }

double tanh_d1(double u) {
  const double t = std::tanh(u);
  return 1.0 - t * t;
}

double tanh_d2(double u) {
  const double t = std::tanh(u);
  return -2.0 * t * (1.0 - t * t);
}

}  // namespace

Activation Activation::sigmoid() {
  // sup|σ| = 1, sup|σ'| = 1/4, sup|σ''| = 1/(6√3)
  return Activation("sigmoid", &wgmf::sigmoid, &sigmoid_d1, &sigmoid_d2, 1.0);
}

Activation Activation::tanh() {
  // sup|tanh''| = 4/(3√3) < 1
  return Activation("tanh", &tanh_value, &tanh_d1, &tanh_d2, 1.0);
}

Activation Activation::by_name(const std::string& name) {
  if (name == "sigmoid") return sigmoid();
  if (name == "tanh") return tanh();
  throw std::invalid_argument("unknown activation '" + name + "'");
}

}  // namespace wgmf
