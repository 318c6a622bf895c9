#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "axon/activation.hpp"
#include "axon/errors.hpp"
#include "axon/matrix.hpp"
#include "axon/parallel.hpp"
#include "axon/rng.hpp"

namespace axon::inner_opt {

struct SolverConfig {
  int restarts = 32;
  int max_iters = 500;
  std::uint64_t seed = 0;
  double tol = 1e-12;          // convergence threshold, relative to |r|
  int degenerate_retries = 3;  // fresh-seeded re-solves before growth stops
};

/// The greedy subproblem data: current orthonormal basis Q, residual r with
/// Q^T r = 0, and the activation g. The objective being maximized is the
/// cosine alignment J(w) = |(r, g(Qw))| / |g(Qw)|, the matching-pursuit
/// least-angle criterion; it is invariant under positive scaling of w when g
/// is positively homogeneous, so the search runs on the unit sphere.
class InnerObjective {
 public:
  InnerObjective(const linalg::Matrix& q, std::vector<double> r, Activation g)
      : q_(q), r_(std::move(r)), g_(std::move(g)) {
    if (q.rows() != r_.size())
      throw std::invalid_argument("InnerObjective: Q rows != r length");
    r_norm_ = linalg::norm2(r_);
    if (r_norm_ <= 0.0)
      throw std::invalid_argument("InnerObjective: residual is zero");
    const std::vector<double> qtr = linalg::tmatvec(q, r_);
    if (linalg::norm_inf(qtr) > 10 * linalg::kTolOrtho * r_norm_)
      throw std::invalid_argument("InnerObjective: residual not orthogonal to Q");
  }

  const linalg::Matrix& q() const { return q_.get(); }
  std::span<const double> r() const { return r_; }
  double r_norm() const { return r_norm_; }
  const Activation& g() const { return g_; }

 private:
  std::reference_wrapper<const linalg::Matrix> q_;
  std::vector<double> r_;
  double r_norm_;
  Activation g_;
};

struct InnerSolution {
  std::vector<double> w;
  double objective_value = 0.0;
  int restarts_used = 0;
};

namespace detail {

inline constexpr double kDenomGuard = 1e-14;

struct Workspace {
  std::vector<double> u;       // Q w
  std::vector<double> gu;      // g(u)
  std::vector<double> weight;  // per-sample backprop weight
};

inline double eval_objective(const InnerObjective& obj,
                             std::span<const double> w, Workspace& ws) {
  const auto& q = obj.q();
  ws.u.assign(q.rows(), 0.0);
  double norm_sq = 0.0;
  double inner = 0.0;
  const auto r = obj.r();
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const double ui = linalg::dot(q.row(i), w);
    const double gi = obj.g()(ui);
    ws.u[i] = ui;
    norm_sq += gi * gi;
    inner += r[i] * gi;
  }
  const double norm = std::sqrt(norm_sq);
  if (norm < kDenomGuard) return 0.0;
  return std::abs(inner) / norm;
}

/// J and its Euclidean gradient. With s = sign((r, g(u))), n = |g(u)|:
///   grad = Q^T [ g'(u) o (s r / n - J g(u) / n^2) ].
inline double eval_objective_grad(const InnerObjective& obj,
                                  std::span<const double> w, Workspace& ws,
                                  std::vector<double>& grad) {
  const auto& q = obj.q();
  const std::size_t n_rows = q.rows(), k = q.cols();
  ws.u.resize(n_rows);
  ws.gu.resize(n_rows);
  ws.weight.resize(n_rows);
  const auto r = obj.r();
  double norm_sq = 0.0, inner = 0.0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double ui = linalg::dot(q.row(i), w);
    const double gi = obj.g()(ui);
    ws.u[i] = ui;
    ws.gu[i] = gi;
    norm_sq += gi * gi;
    inner += r[i] * gi;
  }
  const double norm = std::sqrt(norm_sq);
  grad.assign(k, 0.0);
  if (norm < kDenomGuard) return 0.0;
  const double j_val = std::abs(inner) / norm;
  const double sign = inner >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double gp = obj.g().deriv(ws.u[i]);
    ws.weight[i] = gp * (sign * r[i] / norm - j_val * ws.gu[i] / norm_sq);
  }
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double wi = ws.weight[i];
    const auto row = q.row(i);
    for (std::size_t jj = 0; jj < k; ++jj) grad[jj] += row[jj] * wi;
  }
  return j_val;
}

struct RestartOutcome {
  std::vector<double> w;
  double objective_value = 0.0;
};

/// Projected-gradient ascent on the sphere from one random start. Riemannian
/// step w <- normalize(w + eta (I - w w^T) grad) with backtracking halving.
inline RestartOutcome run_restart(const InnerObjective& obj,
                                  const SolverConfig& cfg, std::uint64_t seed) {
  const std::size_t k = obj.q().cols();
  Rng rng(seed);
  Workspace ws;
  std::vector<double> w = rng.unit_sphere(k);
  std::vector<double> grad, tangent(k), candidate(k);
  double j_cur = eval_objective(obj, w, ws);
  double eta = -1.0;  // set from the first gradient's scale
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    eval_objective_grad(obj, w, ws, grad);
    const double radial = linalg::dot(grad, w);
    double tangent_norm_sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      tangent[i] = grad[i] - radial * w[i];
      tangent_norm_sq += tangent[i] * tangent[i];
    }
    const double tangent_norm = std::sqrt(tangent_norm_sq);
    if (tangent_norm < 1e-300) break;
    if (eta < 0.0) eta = 1.0 / tangent_norm;  // ~1 radian first trial step

    bool accepted = false;
    double j_next = j_cur;
    while (eta * tangent_norm >= 1e-16) {
      double norm_sq = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        candidate[i] = w[i] + eta * tangent[i];
        norm_sq += candidate[i] * candidate[i];
      }
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& x : candidate) x *= inv;
      j_next = eval_objective(obj, candidate, ws);
      if (j_next > j_cur) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    const double gain = j_next - j_cur;
    w.swap(candidate);
    j_cur = j_next;
    eta *= 2.0;
    if (gain < cfg.tol * obj.r_norm()) break;
  }
  return {std::move(w), j_cur};
}

}  // namespace detail

/// J(w) = |(r, g(Qw))| / |g(Qw)|, guarded to 0 when g(Qw) vanishes. The value
/// lies in [0, |r|] by Cauchy-Schwarz. Any nonzero w is accepted; for
/// positively homogeneous g the value only depends on the direction of w.
inline double objective(const InnerObjective& obj, std::span<const double> w) {
  detail::Workspace ws;
  return detail::eval_objective(obj, w, ws);
}

/// Euclidean gradient of the objective (for verification against finite
/// differences; maximize projects it onto the sphere's tangent space).
inline std::vector<double> objective_gradient(const InnerObjective& obj,
                                              std::span<const double> w) {
  detail::Workspace ws;
  std::vector<double> grad;
  detail::eval_objective_grad(obj, w, ws, grad);
  return grad;
}

/// ReLU-only rewrite: relu(z) = (z + |z|)/2 and (r, Qw) = 0 give
/// J(w) = |(r, |Qw|)| / (2 |relu(Qw)|). Agrees with objective() to roundoff.
inline double objective_relu_simplified(const InnerObjective& obj,
                                        std::span<const double> w) {
  if (!obj.g().is_relu())
    throw NotReLU("objective_relu_simplified requires the ReLU activation");
  const auto& q = obj.q();
  const auto r = obj.r();
  double inner_abs = 0.0, relu_norm_sq = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const double ui = linalg::dot(q.row(i), w);
    inner_abs += r[i] * std::abs(ui);
    relu_norm_sq += ui > 0.0 ? ui * ui : 0.0;
  }
  const double relu_norm = std::sqrt(relu_norm_sq);
  if (relu_norm < detail::kDenomGuard) return 0.0;
  return std::abs(inner_abs) / (2.0 * relu_norm);
}

/// Multi-start maximization of the alignment objective. Each restart draws
/// its start from seed_for(cfg.seed, "inner-restart", index), so enlarging
/// cfg.restarts only appends new starts and the best value cannot decrease.
/// Restarts run in parallel; ties break toward the lowest restart index.
/// Throws NoAscent when every restart stays at a negligible objective.
inline InnerSolution maximize(const InnerObjective& obj,
                              const SolverConfig& cfg) {
  if (cfg.restarts < 1)
    throw std::invalid_argument("maximize: restarts must be >= 1");
  std::vector<detail::RestartOutcome> outcomes(cfg.restarts);
  parallel_for(static_cast<std::size_t>(cfg.restarts), [&](std::size_t i) {
    outcomes[i] =
        detail::run_restart(obj, cfg, seed_for(cfg.seed, "inner-restart", i));
  });
  int best = 0;
  for (int i = 1; i < cfg.restarts; ++i)
    if (outcomes[i].objective_value > outcomes[best].objective_value) best = i;
  InnerSolution sol{std::move(outcomes[best].w),
                    outcomes[best].objective_value, cfg.restarts};
  if (sol.objective_value < 1e-14 * obj.r_norm())
    throw NoAscent("maximize: no restart found an improving direction");
  return sol;
}

}  // namespace axon::inner_opt
