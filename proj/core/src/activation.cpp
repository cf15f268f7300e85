#include "rnncert/activation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "rnncert/errors.hpp"

namespace rnncert {

Activation::Activation(ActivationKind kind, double leak) : kind_(kind), leak_(leak) {
  if (kind == ActivationKind::LeakyRelu && !(leak > 0.0 && leak < 1.0)) {
    throw InputError("leaky-relu slope must lie in (0, 1)");
  }
}

Activation Activation::parse(const std::string& tag) {
  if (tag == "tanh") return Activation(ActivationKind::Tanh);
  if (tag == "sigmoid") return Activation(ActivationKind::SigmoidCentered);
  if (tag == "relu") return Activation(ActivationKind::Relu);
  if (tag == "identity") return Activation(ActivationKind::Identity);
  if (tag == "saturation") return Activation(ActivationKind::Saturation);
  if (tag == "leaky-relu") return Activation(ActivationKind::LeakyRelu);
  const std::string prefix = "leaky-relu:";
  if (tag.rfind(prefix, 0) == 0) {
    try {
      return Activation(ActivationKind::LeakyRelu, std::stod(tag.substr(prefix.size())));
    } catch (const std::logic_error&) {
      throw InputError("activation: bad leaky-relu slope in '" + tag + "'");
    }
  }
  throw InputError("activation: unknown tag '" + tag + "'");
}

std::string Activation::tag() const {
  switch (kind_) {
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::SigmoidCentered: return "sigmoid";
    case ActivationKind::Relu: return "relu";
    case ActivationKind::LeakyRelu: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, leak_);
      return "leaky-relu:" + std::string(buf, res.ptr);
    }
    case ActivationKind::Identity: return "identity";
    case ActivationKind::Saturation: return "saturation";
  }
  return "tanh";
}

ActivationClass Activation::slope_class() const {
  switch (kind_) {
    case ActivationKind::LeakyRelu: return ActivationClass::slope(leak_, 1.0);
    case ActivationKind::Identity: return ActivationClass::slope(1.0, 1.0);
    default: return ActivationClass::mone();
  }
}

double Activation::operator()(double x) const {
  switch (kind_) {
    case ActivationKind::Tanh: return std::tanh(x);
    // 4 (sigmoid(x) - 1/2), which has slope 1 at the origin.
    case ActivationKind::SigmoidCentered: return 2.0 * std::tanh(0.5 * x);
    case ActivationKind::Relu: return x > 0.0 ? x : 0.0;
    case ActivationKind::LeakyRelu: return x > 0.0 ? x : leak_ * x;
    case ActivationKind::Identity: return x;
    case ActivationKind::Saturation: return std::clamp(x, -1.0, 1.0);
  }
  return x;
}

Vector Activation::operator()(const Vector& x) const {
  Vector y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = (*this)(x(i));
  return y;
}

}  // namespace rnncert
