#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "axon/errors.hpp"

namespace axon {

/// Pointwise nonlinearity applied to a linear combination of basis functions.
/// The derivative at the ReLU kink is taken as 0.
class Activation {
 public:
  enum class Kind { relu, leaky_relu, identity, custom };

  static Activation relu() { return Activation(Kind::relu, 0.0); }

  static Activation leaky_relu(double slope) {
    return Activation(Kind::leaky_relu, slope);
  }

  static Activation identity() { return Activation(Kind::identity, 0.0); }

  static Activation custom(std::string name, std::function<double(double)> fn,
                           std::function<double(double)> dfn) {
    Activation a(Kind::custom, 0.0);
    a.name_ = std::move(name);
    a.fn_ = std::move(fn);
    a.dfn_ = std::move(dfn);
    return a;
  }

  double operator()(double z) const {
    switch (kind_) {
      case Kind::relu:
        return z > 0.0 ? z : 0.0;
      case Kind::leaky_relu:
        return z > 0.0 ? z : slope_ * z;
      case Kind::identity:
        return z;
      case Kind::custom:
        return fn_(z);
    }
    return 0.0;
  }

  double deriv(double z) const {
    switch (kind_) {
      case Kind::relu:
        return z > 0.0 ? 1.0 : 0.0;
      case Kind::leaky_relu:
        return z > 0.0 ? 1.0 : slope_;
      case Kind::identity:
        return 1.0;
      case Kind::custom:
        return dfn_(z);
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  bool is_relu() const { return kind_ == Kind::relu; }
  double slope() const { return slope_; }
  const std::string& name() const { return name_; }

  /// Parse a serialized activation name ("relu", "identity",
  /// "leaky_relu" + slope). Custom activations are not nameable.
  static Activation from_name(const std::string& name, double slope = 0.01) {
    if (name == "relu") return relu();
    if (name == "identity") return identity();
    if (name == "leaky_relu") return leaky_relu(slope);
    throw SchemaError("activation: unknown name '" + name + "'");
  }

 private:
  Activation(Kind kind, double slope) : kind_(kind), slope_(slope) {
    switch (kind_) {
      case Kind::relu: name_ = "relu"; break;
      case Kind::leaky_relu: name_ = "leaky_relu"; break;
      case Kind::identity: name_ = "identity"; break;
      case Kind::custom: break;
    }
  }

  Kind kind_;
  double slope_;
  std::string name_;
  std::function<double(double)> fn_;
  std::function<double(double)> dfn_;
};

}  // namespace axon
