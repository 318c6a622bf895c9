#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "axon/activation.hpp"
#include "axon/errors.hpp"
#include "axon/matrix.hpp"
#include "axon/qr.hpp"

namespace axon {

/// One grown neuron: the unit direction in the current basis, the
/// Gram-Schmidt coefficients of its activation, and the normalization factor.
struct ModelStep {
  std::vector<double> w;
  std::vector<double> alpha;
  double beta = 0.0;
};

/// Trained network. The approximant is a linear combination (coefficients c,
/// expressed in the orthonormal basis) of d+1+K basis functions: the
/// R-transformed affine features followed by one function per grown neuron.
struct AxonModel {
  std::size_t d = 0;
  linalg::Matrix R;  // (d+1) x (d+1), upper triangular, positive diagonal
  Activation g = Activation::relu();
  std::vector<ModelStep> steps;
  std::vector<double> c;

  std::size_t num_neurons() const { return steps.size(); }
  std::size_t width() const { return d + 1 + steps.size(); }
};

inline void validate_model(const AxonModel& m) {
  if (m.R.rows() != m.d + 1 || m.R.cols() != m.d + 1)
    throw ModelCorrupt("model: R must be (d+1) x (d+1)");
  for (std::size_t k = 0; k < m.steps.size(); ++k) {
    const auto& s = m.steps[k];
    const std::size_t expect = m.d + 1 + k;
    if (s.w.size() != expect || s.alpha.size() != expect)
      throw ModelCorrupt("model: step " + std::to_string(k) +
                         " has wrong vector length");
    if (!(s.beta > 0.0) || !std::isfinite(s.beta))
      throw ModelCorrupt("model: step " + std::to_string(k) +
                         " has non-positive beta");
    const double wn = linalg::norm2(s.w);
    if (std::abs(wn - 1.0) > 1e-10)
      throw ModelCorrupt("model: step " + std::to_string(k) +
                         " direction is not unit length");
  }
  if (m.c.size() != m.width())
    throw ModelCorrupt("model: c has wrong length");
}

/// Values of all basis functions at one input point: v = [1, x] transformed
/// through R^{-T} (reproducing the orthonormalized affine features), then one
/// entry per neuron, v_k = (g(w_k . v) - alpha_k . v) / beta_k.
inline std::vector<double> basis_values(const AxonModel& m,
                                        std::span<const double> x) {
  if (x.size() != m.d)
    throw ModelCorrupt("basis_values: input dimension mismatch");
  std::vector<double> affine(m.d + 1);
  affine[0] = 1.0;
  for (std::size_t s = 0; s < m.d; ++s) affine[s + 1] = x[s];
  std::vector<double> v = linalg::solve_upper_transposed(m.R, affine);
  v.reserve(m.width());
  for (const auto& step : m.steps) {
    const double z = linalg::dot(step.w, v);
    v.push_back((m.g(z) - linalg::dot(step.alpha, v)) / step.beta);
  }
  return v;
}

inline double infer(const AxonModel& m, std::span<const double> x) {
  validate_model(m);
  const std::vector<double> v = basis_values(m, x);
  return linalg::dot(m.c, v);
}

inline double infer(const AxonModel& m, double x) {
  return infer(m, std::span<const double>(&x, 1));
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const char* key,
                                           const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError("model file: missing field " + path);
  return *it;
}

inline double number_at(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number())
    throw SchemaError("model file: " + path + " is not a number");
  return j.get<double>();
}

inline std::vector<double> vector_at(const nlohmann::json& j,
                                     const std::string& path) {
  if (!j.is_array())
    throw SchemaError("model file: " + path + " is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

/// Serialize to a self-describing JSON document. Reals keep their shortest
/// round-trippable decimal form, so load() restores them bit-exactly.
inline void save(const AxonModel& m, const std::string& path) {
  validate_model(m);
  if (m.g.kind() == Activation::Kind::custom)
    throw SchemaError("save: custom activations are not serializable");
  nlohmann::json j;
  j["format_version"] = 1;
  j["d"] = m.d;
  j["K"] = m.steps.size();
  j["activation"] = m.g.name();
  if (m.g.kind() == Activation::Kind::leaky_relu) j["slope"] = m.g.slope();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.R.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t jj = 0; jj < m.R.cols(); ++jj) row.push_back(m.R(i, jj));
    rows.push_back(std::move(row));
  }
  j["R"] = std::move(rows);
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : m.steps) {
    nlohmann::json step;
    step["w"] = s.w;
    step["alpha"] = s.alpha;
    step["beta"] = s.beta;
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  j["c"] = m.c;
  std::ofstream out(path);
  if (!out) throw IoError("save: cannot open '" + path + "' for writing");
  out << j.dump(1) << '\n';
  if (!out) throw IoError("save: write to '" + path + "' failed");
}

inline AxonModel load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model file: parse failure: ") + e.what());
  }
  using detail::number_at;
  using detail::require_field;
  using detail::vector_at;

  const auto version =
      static_cast<long>(number_at(require_field(j, "format_version", "format_version"),
                                  "format_version"));
  if (version != 1)
    throw SchemaError("model file: unsupported format_version " +
                      std::to_string(version));

  AxonModel m;
  const double d_raw = number_at(require_field(j, "d", "d"), "d");
  if (d_raw < 1 || d_raw != std::floor(d_raw))
    throw SchemaError("model file: d must be a positive integer");
  m.d = static_cast<std::size_t>(d_raw);

  const auto& act_json = require_field(j, "activation", "activation");
  if (!act_json.is_string())
    throw SchemaError("model file: activation is not a string");
  const double slope =
      j.contains("slope") ? number_at(j["slope"], "slope") : 0.01;
  m.g = Activation::from_name(act_json.get<std::string>(), slope);

  const auto& r_json = require_field(j, "R", "R");
  if (!r_json.is_array() || r_json.size() != m.d + 1)
    throw SchemaError("model file: R must be a (d+1) x (d+1) array");
  m.R = linalg::Matrix(m.d + 1, m.d + 1);
  for (std::size_t i = 0; i <= m.d; ++i) {
    const auto row =
        vector_at(r_json[i], "R[" + std::to_string(i) + "]");
    if (row.size() != m.d + 1)
      throw SchemaError("model file: R[" + std::to_string(i) +
                        "] has wrong length");
    for (std::size_t jj = 0; jj <= m.d; ++jj) {
      m.R(i, jj) = row[jj];
      if (jj < i && row[jj] != 0.0)
        throw SchemaError("model file: R is not upper triangular at R[" +
                          std::to_string(i) + "][" + std::to_string(jj) + "]");
    }
    if (!(m.R(i, i) > 0.0))
      throw SchemaError("model file: R[" + std::to_string(i) + "][" +
                        std::to_string(i) + "] must be positive");
  }

  const auto& steps_json = require_field(j, "steps", "steps");
  if (!steps_json.is_array())
    throw SchemaError("model file: steps is not an array");
  const double k_raw = number_at(require_field(j, "K", "K"), "K");
  if (k_raw != static_cast<double>(steps_json.size()))
    throw SchemaError("model file: K does not match steps length");
  for (std::size_t k = 0; k < steps_json.size(); ++k) {
    const std::string p = "steps[" + std::to_string(k) + "]";
    const auto& sj = steps_json[k];
    if (!sj.is_object()) throw SchemaError("model file: " + p + " is not an object");
    ModelStep s;
    s.w = vector_at(require_field(sj, "w", p + ".w"), p + ".w");
    s.alpha = vector_at(require_field(sj, "alpha", p + ".alpha"), p + ".alpha");
    s.beta = number_at(require_field(sj, "beta", p + ".beta"), p + ".beta");
    const std::size_t expect = m.d + 1 + k;
    if (s.w.size() != expect)
      throw SchemaError("model file: " + p + ".w has wrong length");
    if (s.alpha.size() != expect)
      throw SchemaError("model file: " + p + ".alpha has wrong length");
    if (!(s.beta > 0.0))
      throw SchemaError("model file: " + p + ".beta must be positive");
    m.steps.push_back(std::move(s));
  }

  m.c = vector_at(require_field(j, "c", "c"), "c");
  if (m.c.size() != m.width())
    throw SchemaError("model file: c has wrong length");
  validate_model(m);
  return m;
}

}  // namespace axon
