#pragma once

#include <string>

#include "rnncert/certificates.hpp"
#include "rnncert/linalg.hpp"

namespace rnncert {

enum class ActivationKind { Tanh, SigmoidCentered, Relu, LeakyRelu, Identity, Saturation };

/// Scalar activation applied componentwise.
class Activation {
 public:
  Activation() = default;
  explicit Activation(ActivationKind kind, double leak = 0.01);

  /// Accepts "tanh", "sigmoid", "relu", "leaky-relu" or "leaky-relu:<a>",
  /// "identity", "saturation".
  static Activation parse(const std::string& tag);

  ActivationKind kind() const { return kind_; }
  double leak() const { return leak_; }
  std::string tag() const;

  /// Slope interval this activation provably respects.
  ActivationClass slope_class() const;

  double operator()(double x) const;
  Vector operator()(const Vector& x) const;

 private:
  ActivationKind kind_ = ActivationKind::Tanh;
  double leak_ = 0.01;
};

}  // namespace rnncert
