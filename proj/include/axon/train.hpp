#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "axon/errors.hpp"
#include "axon/inner_opt.hpp"
#include "axon/matrix.hpp"
#include "axon/model.hpp"
#include "axon/qr.hpp"
#include "axon/rng.hpp"

namespace axon {

using inner_opt::SolverConfig;

struct TrainingSet {
  std::size_t d = 0;
  linalg::Matrix X;        // N x d inputs
  std::vector<double> y;   // N targets

  std::size_t size() const { return X.rows(); }
};

inline void validate_training_set(const TrainingSet& data) {
  if (data.X.cols() != data.d)
    throw std::invalid_argument("TrainingSet: X columns != d");
  if (data.X.rows() != data.y.size())
    throw std::invalid_argument("TrainingSet: X rows != y length");
  if (data.size() < data.d + 2)
    throw std::invalid_argument("TrainingSet: need at least d+2 samples");
  if (!data.X.all_finite())
    throw std::invalid_argument("TrainingSet: non-finite input");
  for (double v : data.y)
    if (!std::isfinite(v))
      throw std::invalid_argument("TrainingSet: non-finite target");
}

enum class StopReason { completed, residual_below_tol, no_ascent, degenerate_direction };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::completed: return "completed";
    case StopReason::residual_below_tol: return "residual_below_tol";
    case StopReason::no_ascent: return "no_ascent";
    case StopReason::degenerate_direction: return "degenerate_direction";
  }
  return "unknown";
}

struct IterationRecord {
  int k = 0;                   // neuron index
  double objective_value = 0;  // inner solver value at selection time
  double beta = 0;             // Gram-Schmidt normalization factor
  double train_rel_l2 = 0;     // |y - Q Q^T y| / |y| after this neuron
  double eval_rel_l2 = std::numeric_limits<double>::quiet_NaN();
};

struct TrainReport {
  double initial_rel_l2 = 0;  // after the affine least-squares fit (K = 0)
  double initial_eval_rel_l2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<IterationRecord> iterations;
  StopReason stop_reason = StopReason::completed;
  double max_ortho_error = 0;        // worst |Q^T Q - I|_max seen while training
  std::vector<double> predictions;   // Q c at the training points
};

/// Called after each growth step with the partially grown model; returns an
/// evaluation-grid error to record. Optional.
using EvalCallback = std::function<double(const AxonModel&)>;

/// Initial sample-value matrix: column 0 is all ones, column s holds input
/// coordinate s. This ones-first order is used everywhere, including the
/// inference-side feature vector [1, x].
inline linalg::Matrix build_initial_basis(const linalg::Matrix& x) {
  linalg::Matrix v(x.rows(), x.cols() + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    v(i, 0) = 1.0;
    for (std::size_t s = 0; s < x.cols(); ++s) v(i, s + 1) = x(i, s);
  }
  return v;
}

namespace detail {

inline constexpr double kResidualStopTol = 1e-13;

inline AxonModel snapshot_model(std::size_t d, const linalg::Matrix& r,
                                const Activation& g,
                                const std::vector<ModelStep>& steps,
                                const linalg::OrthoBasis& basis,
                                std::span<const double> y) {
  AxonModel m;
  m.d = d;
  m.R = r;
  m.g = g;
  m.steps = steps;
  m.c = linalg::tmatvec(basis.Q, y);
  return m;
}

}  // namespace detail

/// Greedy growth: starting from the orthonormalized affine basis, repeatedly
/// pick the direction whose activated combination best aligns with the
/// residual, orthogonalize it in, and append it as a new basis function. The
/// final coefficients are c = Q^T y, the least-squares solution in the
/// orthonormal basis. Growth stops early when the residual falls below
/// 1e-13 |y|, the inner solver finds no ascent direction, or the new function
/// is degenerate after cfg.degenerate_retries fresh-seeded re-solves.
inline std::pair<AxonModel, TrainReport> train(const TrainingSet& data,
                                               int num_neurons,
                                               const Activation& g,
                                               const SolverConfig& cfg,
                                               const EvalCallback& eval = {}) {
  validate_training_set(data);
  if (num_neurons < 0)
    throw std::invalid_argument("train: neuron count must be >= 0");

  linalg::OrthoBasis basis = linalg::thin_qr(build_initial_basis(data.X));
  const linalg::Matrix r_factor = basis.R;
  const double y_norm = linalg::norm2(data.y);
  const double y_denom = y_norm > 0.0 ? y_norm : 1.0;

  TrainReport report;
  std::vector<ModelStep> steps;
  report.max_ortho_error = linalg::orthonormality_error(basis.Q);

  {
    const auto r0 = linalg::project_residual(basis.Q, data.y);
    report.initial_rel_l2 = linalg::norm2(r0) / y_denom;
  }
  if (eval)
    report.initial_eval_rel_l2 = eval(
        detail::snapshot_model(data.d, r_factor, g, steps, basis, data.y));

  for (int k = 0; k < num_neurons; ++k) {
    std::vector<double> residual = linalg::project_residual(basis.Q, data.y);
    const double res_norm = linalg::norm2(residual);
    if (res_norm <= detail::kResidualStopTol * y_norm) {
      report.stop_reason = StopReason::residual_below_tol;
      break;
    }
    // A second projection keeps Q^T r at roundoff relative to |r| even when
    // |r| is many orders below |y|.
    residual = linalg::project_residual(basis.Q, residual);

    inner_opt::InnerObjective objective(basis.Q, std::move(residual), g);
    bool appended = false;
    for (int attempt = 0; attempt <= cfg.degenerate_retries; ++attempt) {
      SolverConfig attempt_cfg = cfg;
      if (attempt > 0)
        attempt_cfg.seed = seed_for(cfg.seed, "degenerate-retry",
                                    static_cast<std::uint64_t>(k) * 16 + attempt);
      inner_opt::InnerSolution sol;
      try {
        sol = inner_opt::maximize(objective, attempt_cfg);
      } catch (const NoAscent&) {
        report.stop_reason = StopReason::no_ascent;
        break;
      }
      const std::vector<double> phi = [&] {
        std::vector<double> u = linalg::matvec(basis.Q, sol.w);
        for (auto& z : u) z = g(z);
        return u;
      }();
      try {
        linalg::GsResult gs = linalg::gs_append(basis, phi);
        ModelStep step{std::move(sol.w), std::move(gs.alpha), gs.beta};
        steps.push_back(std::move(step));

        IterationRecord rec;
        rec.k = k;
        rec.objective_value = sol.objective_value;
        rec.beta = gs.beta;
        const auto r_next = linalg::project_residual(basis.Q, data.y);
        rec.train_rel_l2 = linalg::norm2(r_next) / y_denom;
        if (eval)
          rec.eval_rel_l2 = eval(detail::snapshot_model(
              data.d, r_factor, g, steps, basis, data.y));
        report.iterations.push_back(std::move(rec));
        report.max_ortho_error = std::max(
            report.max_ortho_error, linalg::orthonormality_error(basis.Q));
        appended = true;
      } catch (const DegenerateDirection&) {
        if (attempt == cfg.degenerate_retries)
          report.stop_reason = StopReason::degenerate_direction;
        continue;
      }
      break;
    }
    if (!appended) break;
  }

  AxonModel model =
      detail::snapshot_model(data.d, r_factor, g, steps, basis, data.y);
  report.predictions = linalg::matvec(basis.Q, model.c);
  return {std::move(model), std::move(report)};
}

}  // namespace axon
