#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "axon/activation.hpp"
#include "axon/errors.hpp"
#include "axon/matrix.hpp"
#include "axon/model.hpp"
#include "axon/parallel.hpp"
#include "axon/qr.hpp"
#include "axon/rng.hpp"
#include "axon/train.hpp"

namespace axon::baseline {

struct BaselineConfig {
  enum class Optimizer { gd, adam };

  int restarts = 20;
  int epochs = 20000;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::adam;
  bool backtracking = false;  // plain-GD line search on the projected step
  double init_scale = 0.1;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
};

/// Gradients of the trainable parameters {w_k, alpha_k, beta_k, c}; the
/// beta gradient rides in ModelStep::beta. R is data-determined
/// preprocessing and stays fixed.
struct ParamGradients {
  std::vector<ModelStep> steps;
  std::vector<double> c;
};

struct LossGrad {
  double loss = 0.0;
  ParamGradients grads;
};

namespace detail {

/// Forward intermediates for one training point: the basis-value vector and
/// the pre-activations, reused across points.
struct GradientTape {
  std::vector<double> v;
  std::vector<double> z;
  std::vector<double> vbar;
};

/// Rows are the R-transformed affine features of each training point, i.e.
/// the fixed first d+1 basis values.
inline linalg::Matrix initial_features(const linalg::Matrix& r_factor,
                                       const linalg::Matrix& x) {
  const std::size_t d = x.cols();
  linalg::Matrix feats(x.rows(), d + 1);
  std::vector<double> affine(d + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    affine[0] = 1.0;
    for (std::size_t s = 0; s < d; ++s) affine[s + 1] = x(i, s);
    const auto row = linalg::solve_upper_transposed(r_factor, affine);
    for (std::size_t j = 0; j <= d; ++j) feats(i, j) = row[j];
  }
  return feats;
}

inline void zero_like(const AxonModel& m, ParamGradients& g) {
  g.steps.resize(m.steps.size());
  for (std::size_t k = 0; k < m.steps.size(); ++k) {
    g.steps[k].w.assign(m.steps[k].w.size(), 0.0);
    g.steps[k].alpha.assign(m.steps[k].alpha.size(), 0.0);
    g.steps[k].beta = 0.0;
  }
  g.c.assign(m.c.size(), 0.0);
}

/// Mean-squared-error loss and its gradient over the given sample indices,
/// by reverse accumulation through the inference graph. Throws
/// NumericalBlowup when anything goes non-finite.
inline double loss_and_grad_features(const AxonModel& m,
                                     const linalg::Matrix& feats,
                                     std::span<const double> y,
                                     std::span<const std::size_t> indices,
                                     ParamGradients& grads,
                                     GradientTape& tape) {
  const std::size_t d1 = m.d + 1, width = m.width(), k_count = m.steps.size();
  zero_like(m, grads);
  tape.v.resize(width);
  tape.z.resize(k_count);
  tape.vbar.resize(width);
  double loss = 0.0;
  for (const std::size_t i : indices) {
    auto& v = tape.v;
    for (std::size_t j = 0; j < d1; ++j) v[j] = feats(i, j);
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& st = m.steps[k];
      const std::size_t n = d1 + k;
      double z = 0.0, proj = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        z += st.w[j] * v[j];
        proj += st.alpha[j] * v[j];
      }
      tape.z[k] = z;
      v[d1 + k] = (m.g(z) - proj) / st.beta;
    }
    double pred = 0.0;
    for (std::size_t j = 0; j < width; ++j) pred += m.c[j] * v[j];
    const double diff = pred - y[i];
    loss += diff * diff;

    const double pbar = 2.0 * diff / static_cast<double>(indices.size());
    auto& vbar = tape.vbar;
    for (std::size_t j = 0; j < width; ++j) {
      grads.c[j] += pbar * v[j];
      vbar[j] = pbar * m.c[j];
    }
    for (std::size_t kk = 0; kk < k_count; ++kk) {
      const std::size_t k = k_count - 1 - kk;
      const auto& st = m.steps[k];
      auto& gst = grads.steps[k];
      const std::size_t idx = d1 + k;
      const double vb = vbar[idx];
      const double common = vb / st.beta;
      gst.beta -= common * v[idx];
      const double zbar = common * m.g.deriv(tape.z[k]);
      for (std::size_t j = 0; j < idx; ++j) {
        gst.w[j] += zbar * v[j];
        gst.alpha[j] -= common * v[j];
        vbar[j] += zbar * st.w[j] - common * st.alpha[j];
      }
    }
  }
  loss /= static_cast<double>(indices.size());

  if (!std::isfinite(loss))
    throw NumericalBlowup("baseline: loss is non-finite");
  for (const auto& gs : grads.steps) {
    for (double g : gs.w)
      if (!std::isfinite(g)) throw NumericalBlowup("baseline: gradient is non-finite");
    for (double g : gs.alpha)
      if (!std::isfinite(g)) throw NumericalBlowup("baseline: gradient is non-finite");
    if (!std::isfinite(gs.beta))
      throw NumericalBlowup("baseline: gradient is non-finite");
  }
  for (double g : grads.c)
    if (!std::isfinite(g)) throw NumericalBlowup("baseline: gradient is non-finite");
  return loss;
}

inline double loss_only_features(const AxonModel& m, const linalg::Matrix& feats,
                                 std::span<const double> y,
                                 std::span<const std::size_t> indices,
                                 GradientTape& tape) {
  const std::size_t d1 = m.d + 1, width = m.width(), k_count = m.steps.size();
  tape.v.resize(width);
  double loss = 0.0;
  for (const std::size_t i : indices) {
    auto& v = tape.v;
    for (std::size_t j = 0; j < d1; ++j) v[j] = feats(i, j);
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& st = m.steps[k];
      double z = 0.0, proj = 0.0;
      for (std::size_t j = 0; j < d1 + k; ++j) {
        z += st.w[j] * v[j];
        proj += st.alpha[j] * v[j];
      }
      v[d1 + k] = (m.g(z) - proj) / st.beta;
    }
    double pred = 0.0;
    for (std::size_t j = 0; j < width; ++j) pred += m.c[j] * v[j];
    const double diff = pred - y[i];
    loss += diff * diff;
  }
  return loss / static_cast<double>(indices.size());
}

}  // namespace detail

/// MSE training loss and its gradient with respect to {w_k, alpha_k, beta_k, c}.
inline LossGrad loss_and_grad(const AxonModel& m, const TrainingSet& data) {
  validate_training_set(data);
  if (m.d != data.d)
    throw std::invalid_argument("loss_and_grad: model/data dimension mismatch");
  for (const auto& st : m.steps)
    if (!(st.beta > 0.0))
      throw ModelCorrupt("loss_and_grad: beta must be positive");
  const linalg::Matrix feats = detail::initial_features(m.R, data.X);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  LossGrad out;
  detail::GradientTape tape;
  out.loss = detail::loss_and_grad_features(m, feats, data.y, all, out.grads, tape);
  return out;
}

struct RestartRecord {
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  std::vector<double> loss_history;  // full-batch loss per epoch + final
};

struct BaselineResult {
  AxonModel best_model;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_restart = -1;
  std::vector<double> per_restart_losses;  // NaN marks a diverged restart
  std::vector<RestartRecord> restarts;
};

namespace detail {

inline void adam_update_vec(std::vector<double>& p, const std::vector<double>& g,
                            std::vector<double>& m1, std::vector<double>& m2,
                            double lr, double bc1, double bc2) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    m1[i] = 0.9 * m1[i] + 0.1 * g[i];
    m2[i] = 0.999 * m2[i] + 0.001 * g[i] * g[i];
    p[i] -= lr * (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + 1e-8);
  }
}

inline void adam_update_scalar(double& p, double g, double& m1, double& m2,
                               double lr, double bc1, double bc2) {
  m1 = 0.9 * m1 + 0.1 * g;
  m2 = 0.999 * m2 + 0.001 * g * g;
  p -= lr * (m1 / bc1) / (std::sqrt(m2 / bc2) + 1e-8);
}

inline void project_params(AxonModel& m) {
  for (auto& st : m.steps) {
    const double wn = linalg::norm2(st.w);
    if (wn > 0.0)
      for (auto& x : st.w) x /= wn;
    st.beta = std::max(st.beta, 1e-6);
  }
}

struct AdamState {
  ParamGradients m, v;
  long step = 0;

  void apply(AxonModel& params, const ParamGradients& grads, double lr) {
    ++step;
    const double bc1 = 1.0 - std::pow(0.9, step);
    const double bc2 = 1.0 - std::pow(0.999, step);
    for (std::size_t k = 0; k < params.steps.size(); ++k) {
      adam_update_vec(params.steps[k].w, grads.steps[k].w, m.steps[k].w,
                      v.steps[k].w, lr, bc1, bc2);
      adam_update_vec(params.steps[k].alpha, grads.steps[k].alpha,
                      m.steps[k].alpha, v.steps[k].alpha, lr, bc1, bc2);
      adam_update_scalar(params.steps[k].beta, grads.steps[k].beta,
                         m.steps[k].beta, v.steps[k].beta, lr, bc1, bc2);
    }
    adam_update_vec(params.c, grads.c, m.c, v.c, lr, bc1, bc2);
    project_params(params);
  }
};

inline void gd_step(AxonModel& m, const ParamGradients& g, double step_size) {
  for (std::size_t k = 0; k < m.steps.size(); ++k) {
    auto& st = m.steps[k];
    const auto& gs = g.steps[k];
    for (std::size_t j = 0; j < st.w.size(); ++j) st.w[j] -= step_size * gs.w[j];
    for (std::size_t j = 0; j < st.alpha.size(); ++j)
      st.alpha[j] -= step_size * gs.alpha[j];
    st.beta -= step_size * gs.beta;
  }
  for (std::size_t j = 0; j < m.c.size(); ++j) m.c[j] -= step_size * g.c[j];
  project_params(m);
}

inline AxonModel random_init(std::size_t d, const linalg::Matrix& r_factor,
                             const Activation& g, int k_count,
                             const BaselineConfig& cfg, Rng& rng) {
  AxonModel m;
  m.d = d;
  m.R = r_factor;
  m.g = g;
  for (int k = 0; k < k_count; ++k) {
    ModelStep st;
    st.w = rng.unit_sphere(d + 1 + static_cast<std::size_t>(k));
    st.alpha.resize(st.w.size());
    for (auto& a : st.alpha) a = cfg.init_scale * rng.normal();
    st.beta = 1.0;
    m.steps.push_back(std::move(st));
  }
  m.c.resize(m.width());
  for (auto& ci : m.c) ci = cfg.init_scale * rng.normal();
  return m;
}

inline RestartRecord run_restart(AxonModel& params, const linalg::Matrix& feats,
                                 std::span<const double> y,
                                 const BaselineConfig& cfg, Rng& rng) {
  RestartRecord rec;
  std::vector<std::size_t> all(y.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  GradientTape tape;
  ParamGradients grads;
  AdamState adam;
  if (cfg.optimizer == BaselineConfig::Optimizer::adam) {
    zero_like(params, adam.m);
    zero_like(params, adam.v);
  }
  const bool minibatch = cfg.batch_size > 0 &&
                         static_cast<std::size_t>(cfg.batch_size) < y.size();
  std::vector<std::size_t> order = all;
  double step_size = cfg.learning_rate;
  try {
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const double epoch_loss =
          loss_and_grad_features(params, feats, y, all, grads, tape);
      rec.loss_history.push_back(epoch_loss);
      if (cfg.optimizer == BaselineConfig::Optimizer::gd && cfg.backtracking) {
        // Projected backtracking: accept only a step that does not increase
        // the loss; halve until one is found or the step degenerates.
        step_size = std::min(step_size * 2.0, cfg.learning_rate * 1024.0);
        bool accepted = false;
        while (step_size > 1e-18) {
          AxonModel candidate = params;
          gd_step(candidate, grads, step_size);
          const double cand_loss = loss_only_features(candidate, feats, y, all, tape);
          if (std::isfinite(cand_loss) && cand_loss <= epoch_loss) {
            params = std::move(candidate);
            accepted = true;
            break;
          }
          step_size *= 0.5;
        }
        if (!accepted) break;  // no non-increasing step exists; stop here
      } else if (minibatch) {
        // Seeded shuffle, then one update per batch.
        for (std::size_t i = order.size(); i > 1; --i) {
          const std::size_t j = rng.next_u64() % i;
          std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
          const std::size_t stop = std::min(
              order.size(), start + static_cast<std::size_t>(cfg.batch_size));
          std::span<const std::size_t> batch(order.data() + start, stop - start);
          loss_and_grad_features(params, feats, y, batch, grads, tape);
          if (cfg.optimizer == BaselineConfig::Optimizer::adam)
            adam.apply(params, grads, cfg.learning_rate);
          else
            gd_step(params, grads, cfg.learning_rate);
        }
      } else if (cfg.optimizer == BaselineConfig::Optimizer::adam) {
        adam.apply(params, grads, cfg.learning_rate);
      } else {
        gd_step(params, grads, cfg.learning_rate);
      }
    }
    const double final_loss = loss_only_features(params, feats, y, all, tape);
    if (!std::isfinite(final_loss))
      throw NumericalBlowup("baseline: loss is non-finite");
    rec.loss_history.push_back(final_loss);
    rec.final_loss = final_loss;
  } catch (const NumericalBlowup&) {
    rec.diverged = true;
  }
  return rec;
}

}  // namespace detail

/// Train the same architecture from scratch: per restart, draw w_k uniformly
/// on the unit sphere, alpha_k and c from N(0, init_scale), beta_k = 1, then
/// run gradient descent (plain or adaptive-moment), re-normalizing w_k and
/// clamping beta_k >= 1e-6 after each update. Diverged restarts are recorded
/// and excluded; the best surviving restart (lowest final loss, ties to the
/// lowest index) wins. Throws AllDiverged when nothing survives.
inline BaselineResult train_random_init(const TrainingSet& data, int k_count,
                                        const Activation& g,
                                        const BaselineConfig& cfg) {
  validate_training_set(data);
  if (cfg.restarts < 1)
    throw std::invalid_argument("train_random_init: restarts must be >= 1");
  if (!(cfg.learning_rate > 0.0))
    throw std::invalid_argument("train_random_init: learning rate must be > 0");
  const linalg::OrthoBasis basis = linalg::thin_qr(build_initial_basis(data.X));
  const linalg::Matrix feats = detail::initial_features(basis.R, data.X);

  BaselineResult result;
  result.restarts.resize(cfg.restarts);
  std::vector<AxonModel> models(cfg.restarts);
  parallel_for(static_cast<std::size_t>(cfg.restarts), [&](std::size_t r) {
    Rng rng(seed_for(cfg.seed, "baseline-restart", r));
    models[r] = detail::random_init(data.d, basis.R, g, k_count, cfg, rng);
    result.restarts[r] = detail::run_restart(models[r], feats, data.y, cfg, rng);
  });

  result.per_restart_losses.resize(cfg.restarts);
  for (int r = 0; r < cfg.restarts; ++r) {
    const auto& rec = result.restarts[r];
    result.per_restart_losses[r] = rec.final_loss;
    if (!rec.diverged && rec.final_loss < result.best_loss) {
      result.best_loss = rec.final_loss;
      result.best_restart = r;
    }
  }
  if (result.best_restart < 0)
    throw AllDiverged("train_random_init: every restart diverged");
  result.best_model = std::move(models[result.best_restart]);
  return result;
}

}  // namespace axon::baseline
