#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "axon/baseline.hpp"
#include "axon/csv.hpp"
#include "axon/errors.hpp"
#include "axon/model.hpp"
#include "axon/problems.hpp"
#include "axon/svg_plot.hpp"
#include "axon/train.hpp"
#include "axon/yarotsky.hpp"

namespace axon::experiment {

/// All knobs of one experiment run. A single root seed feeds every random
/// stream through labeled splits (seed_for(seed, label, index)), so the
/// sampling, inner-solver and baseline streams stay independent: adding a
/// method re-runs nothing differently.
struct ExperimentConfig {
  std::string problem = "x2";
  int k_max = 10;
  std::vector<std::string> methods = {"axon"};
  std::uint64_t seed = 0;
  std::size_t n = 0;          // 0 = per-dimension default
  std::size_t eval_grid = 0;  // 0 = per-dimension default
  std::string activation = "relu";
  double leaky_slope = 0.01;

  int solver_restarts = 32;
  int solver_max_iters = 500;
  double solver_tol = 1e-12;

  baseline::BaselineConfig base;  // restarts/epochs/lr/... for the random-init arm
  int baseline_stride = 1;        // baseline trains at K = 0, s, 2s, ..., k_max

  std::string out_dir = ".";
};

struct ErrorRow {
  std::string method;
  int k = 0;  // neuron count, or depth m for the explicit construction
  double rel_l2 = 0.0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
};

struct RestartLossRow {
  int k = 0;
  int restart = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
};

struct ExperimentReport {
  std::string problem;
  std::vector<ErrorRow> rows;
  std::vector<RestartLossRow> baseline_losses;
  AxonModel featured_model;  // source of basis.csv (axon's if it ran)
  bool has_featured_model = false;
  bool comparison_checked = false;
  bool comparison_met = false;
  int comparison_k = 0;
  double comparison_axon = 0.0;
  double comparison_baseline = 0.0;
  nlohmann::json config_echo;
};

namespace detail {

inline double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

inline Activation make_activation(const ExperimentConfig& cfg) {
  return Activation::from_name(cfg.activation, cfg.leaky_slope);
}

inline std::vector<int> baseline_k_values(int k_max, int stride) {
  std::set<int> ks;
  if (stride < 1) stride = 1;
  for (int k = 0; k <= k_max; k += stride) ks.insert(k);
  ks.insert(k_max);
  return {ks.begin(), ks.end()};
}

inline nlohmann::json echo_config(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["problem"] = cfg.problem;
  j["kmax"] = cfg.k_max;
  j["methods"] = cfg.methods;
  j["seed"] = cfg.seed;
  j["n"] = cfg.n;
  j["eval_grid"] = cfg.eval_grid;
  j["activation"] = cfg.activation;
  if (cfg.activation == "leaky_relu") j["slope"] = cfg.leaky_slope;
  j["solver_restarts"] = cfg.solver_restarts;
  j["solver_max_iters"] = cfg.solver_max_iters;
  j["solver_tol"] = cfg.solver_tol;
  j["baseline_restarts"] = cfg.base.restarts;
  j["baseline_epochs"] = cfg.base.epochs;
  j["baseline_lr"] = cfg.base.learning_rate;
  j["baseline_optimizer"] =
      cfg.base.optimizer == baseline::BaselineConfig::Optimizer::adam ? "adam"
                                                                      : "gd";
  j["baseline_backtracking"] = cfg.base.backtracking;
  j["baseline_init_scale"] = cfg.base.init_scale;
  j["baseline_batch_size"] = cfg.base.batch_size;
  j["baseline_stride"] = cfg.baseline_stride;
  return j;
}

}  // namespace detail

/// Run the configured methods against one catalog problem and collect the
/// error-vs-size curves. Methods: "axon" (greedy growth, one training run,
/// errors recorded per neuron count), "baseline" (random-init gradient
/// descent, best of cfg.base.restarts, at K = 0, stride, ..., k_max) and, for
/// the x2 problem only, "yarotsky" (the explicit construction, per depth m).
/// Fills `report` incrementally so callers can flush partial results when a
/// later method fails.
inline void run(const ExperimentConfig& cfg, const problems::Problem& problem,
                ExperimentReport& report) {
  report.problem = problem.name;
  report.config_echo = detail::echo_config(cfg);

  const std::size_t n =
      cfg.n > 0 ? cfg.n : problems::default_train_size(problem.d);
  const std::size_t grid =
      cfg.eval_grid > 0 ? cfg.eval_grid : problems::default_eval_grid(problem.d);
  const Activation g = detail::make_activation(cfg);
  const TrainingSet data = problems::sample(
      problem, n, problems::SampleScheme::grid, seed_for(cfg.seed, "sample"));

  const auto model_error = [&](const AxonModel& m) {
    return problems::rel_l2_error(
        [&](std::span<const double> x) { return infer(m, x); }, problem, grid);
  };

  double axon_at_kmax = std::numeric_limits<double>::quiet_NaN();
  double baseline_at_kmax = std::numeric_limits<double>::quiet_NaN();

  for (const std::string& method : cfg.methods) {
    if (method == "axon") {
      SolverConfig scfg;
      scfg.restarts = cfg.solver_restarts;
      scfg.max_iters = cfg.solver_max_iters;
      scfg.tol = cfg.solver_tol;
      scfg.seed = seed_for(cfg.seed, "inner-opt");
      const double t0 = detail::now_ms();
      std::vector<double> times;
      const auto [model, train_report] =
          train(data, cfg.k_max, g, scfg, [&](const AxonModel& m) {
            times.push_back(detail::now_ms() - t0);
            return model_error(m);
          });
      report.rows.push_back({"axon", 0, train_report.initial_eval_rel_l2,
                             times.empty() ? 0.0 : times.front(), scfg.seed});
      for (std::size_t i = 0; i < train_report.iterations.size(); ++i) {
        report.rows.push_back({"axon", static_cast<int>(i) + 1,
                               train_report.iterations[i].eval_rel_l2,
                               i + 1 < times.size() ? times[i + 1] : 0.0,
                               scfg.seed});
        if (static_cast<int>(i) + 1 == cfg.k_max)
          axon_at_kmax = train_report.iterations[i].eval_rel_l2;
      }
      report.featured_model = model;
      report.has_featured_model = true;
    } else if (method == "baseline") {
      for (int k : detail::baseline_k_values(cfg.k_max, cfg.baseline_stride)) {
        baseline::BaselineConfig bcfg = cfg.base;
        bcfg.seed = seed_for(cfg.seed, "baseline", static_cast<std::uint64_t>(k));
        const double t0 = detail::now_ms();
        const auto result = baseline::train_random_init(data, k, g, bcfg);
        const double err = model_error(result.best_model);
        report.rows.push_back(
            {"baseline", k, err, detail::now_ms() - t0, bcfg.seed});
        if (k == cfg.k_max) baseline_at_kmax = err;
        for (int r = 0; r < bcfg.restarts; ++r)
          report.baseline_losses.push_back(
              {k, r, result.restarts[r].final_loss,
               result.restarts[r].diverged});
        if (!report.has_featured_model) {
          report.featured_model = result.best_model;
          report.has_featured_model = true;
        }
      }
    } else if (method == "yarotsky") {
      if (problem.name != "x2")
        throw std::invalid_argument(
            "experiment: the yarotsky method only applies to problem x2");
      for (int m = 1; m <= cfg.k_max; ++m) {
        const double t0 = detail::now_ms();
        const yarotsky::YarotskyApproximant fm(static_cast<std::size_t>(m));
        const double err = problems::rel_l2_error(
            [&](std::span<const double> x) { return fm(x[0]); }, problem, grid);
        report.rows.push_back(
            {"yarotsky", m, err, detail::now_ms() - t0, cfg.seed});
      }
    } else {
      throw std::invalid_argument("experiment: unknown method '" + method + "'");
    }
  }

  if (std::isfinite(axon_at_kmax) && std::isfinite(baseline_at_kmax)) {
    report.comparison_checked = true;
    report.comparison_k = cfg.k_max;
    report.comparison_axon = axon_at_kmax;
    report.comparison_baseline = baseline_at_kmax;
    report.comparison_met = baseline_at_kmax > axon_at_kmax;
  }
}

inline ExperimentReport run(const ExperimentConfig& cfg,
                            const problems::Problem& problem) {
  ExperimentReport report;
  run(cfg, problem, report);
  return report;
}

/// errors.csv: one row per (method, model size) with the dense-grid error.
inline void write_errors_csv(const std::string& path,
                             const ExperimentReport& report) {
  csv::Writer out(path);
  out.row({"method", "K", "rel_l2"});
  for (const auto& row : report.rows)
    out.row({row.method, std::to_string(row.k), csv::format_double(row.rel_l2)});
  out.close();
}

/// basis.csv: the first six basis functions of the featured model sampled on
/// the evaluation grid.
inline void write_basis_csv(const std::string& path,
                            const ExperimentReport& report,
                            const problems::Problem& problem,
                            std::size_t eval_grid) {
  if (!report.has_featured_model) return;
  const AxonModel& m = report.featured_model;
  const std::size_t count = std::min<std::size_t>(6, m.width());
  csv::Writer out(path);
  std::vector<std::string> header;
  header.push_back("x");
  if (problem.d == 2) header.push_back("y");
  for (std::size_t i = 0; i < count; ++i)
    header.push_back("phi" + std::to_string(i));
  out.row(header);
  for (const auto& x : problems::eval_points(problem, eval_grid)) {
    const auto values = basis_values(m, x);
    std::vector<std::string> fields;
    fields.reserve(problem.d + count);
    for (double xi : x) fields.push_back(csv::format_double(xi));
    for (std::size_t i = 0; i < count; ++i)
      fields.push_back(csv::format_double(values[i]));
    out.row(fields);
  }
  out.close();
}

inline void write_baseline_losses_csv(const std::string& path,
                                      const ExperimentReport& report) {
  csv::Writer out(path);
  out.row({"K", "restart", "final_loss", "diverged"});
  for (const auto& row : report.baseline_losses)
    out.row({std::to_string(row.k), std::to_string(row.restart),
             row.diverged ? std::string() : csv::format_double(row.final_loss),
             row.diverged ? "true" : "false"});
  out.close();
}

inline void write_errors_svg(const std::string& path,
                             const ExperimentReport& report) {
  std::vector<svg::Series> series;
  for (const auto& row : report.rows) {
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const svg::Series& s) { return s.label == row.method; });
    if (it == series.end()) {
      series.push_back({row.method, {}});
      it = series.end() - 1;
    }
    if (std::isfinite(row.rel_l2))
      it->points.emplace_back(row.k, std::max(row.rel_l2, 1e-16));
  }
  svg::write_log_line_plot(path, "relative L2 error vs model size (" +
                                     report.problem + ")",
                           "neurons", "relative L2 error", series);
}

/// TrainReport CSV: first row is the affine least-squares starting point
/// (neurons = 0, no objective/beta), then one row per grown neuron.
inline void write_train_report_csv(const std::string& path,
                                   const TrainReport& report) {
  csv::Writer out(path);
  out.row({"neurons", "objective_value", "beta", "train_rel_l2", "eval_rel_l2"});
  const auto eval_str = [](double v) {
    return std::isnan(v) ? std::string() : csv::format_double(v);
  };
  out.row({"0", "", "", csv::format_double(report.initial_rel_l2),
           eval_str(report.initial_eval_rel_l2)});
  for (const auto& it : report.iterations)
    out.row({std::to_string(it.k + 1), csv::format_double(it.objective_value),
             csv::format_double(it.beta), csv::format_double(it.train_rel_l2),
             eval_str(it.eval_rel_l2)});
  out.close();
}

inline void write_config_echo(const std::string& path,
                              const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("experiment: cannot open '" + path + "'");
  out << report.config_echo.dump(1) << '\n';
  if (!out) throw IoError("experiment: write to '" + path + "' failed");
}

}  // namespace axon::experiment
