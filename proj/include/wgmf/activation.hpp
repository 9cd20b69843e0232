#pragma once

#include <cmath>
#include <string>
#include <utility>

namespace wgmf {

/// Scalar activation with its first two derivatives.
///
/// `c2_bound` is an upper bound for |σ|, |σ'| and |σ''| over the real line;
/// the field bounds in `fields.hpp` are stated in terms of it.
class Activation {
 public:
  using Fn = double (*)(double);

  Activation(std::string name, Fn value, Fn first, Fn second, double c2_bound)
      : name_(std::move(name)), value_(value), first_(first), second_(second), c2_bound_(c2_bound) {}

  /// 1 / (1 + e^{-u}), evaluated without overflow for large |u|.
  static Activation sigmoid();
  static Activation tanh();

  static Activation by_name(const std::string& name);

  double operator()(double u) const { return value_(u); }
  double value(double u) const { return value_(u); }
  double first_derivative(double u) const { return first_(u); }
  double second_derivative(double u) const { return second_(u); }
  double c2_bound() const { return c2_bound_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn value_;
  Fn first_;
  Fn second_;
  double c2_bound_;
};

inline double sigmoid(double u) {
  if (u >= 0.0) {
    return 1.0 / (1.0 + std::exp(-u));
  }
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace wgmf
