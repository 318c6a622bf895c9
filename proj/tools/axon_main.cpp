// Command-line front end: train/eval single models, reproduce the benchmark
// error curves, and tabulate the explicit x^2 construction.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "axon/axon.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string problem_names(const std::vector<axon::problems::Problem>& list) {
  std::string out;
  for (const auto& p : list) {
    if (!out.empty()) out += ", ";
    out += p.name;
  }
  return out;
}

const axon::problems::Problem& require_problem(
    const std::vector<axon::problems::Problem>& list, const std::string& name) {
  const auto* p = axon::problems::find_problem(list, name);
  if (!p)
    throw UsageError("unknown problem '" + name + "' (expected one of: " +
                     problem_names(list) + ")");
  return *p;
}

std::vector<std::string> split_methods(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : csv) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct TrainOptions {
  std::string problem;
  int k = 10;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int restarts = 32;
  int max_iters = 500;
  double tol = 1e-12;
  std::string activation = "relu";
  double slope = 0.01;
  std::size_t eval_grid = 0;
  std::string out;
  std::string report;
};

int cmd_train(const TrainOptions& opt) {
  const auto list = axon::problems::catalog();
  const auto& problem = require_problem(list, opt.problem);
  const std::size_t n =
      opt.n > 0 ? opt.n : axon::problems::default_train_size(problem.d);
  const std::size_t grid = opt.eval_grid > 0
                               ? opt.eval_grid
                               : axon::problems::default_eval_grid(problem.d);
  const auto data = axon::problems::sample(problem, n,
                                           axon::problems::SampleScheme::grid,
                                           axon::seed_for(opt.seed, "sample"));
  axon::SolverConfig cfg;
  cfg.restarts = opt.restarts;
  cfg.max_iters = opt.max_iters;
  cfg.tol = opt.tol;
  cfg.seed = axon::seed_for(opt.seed, "inner-opt");
  const auto g = axon::Activation::from_name(opt.activation, opt.slope);

  double final_eval = std::numeric_limits<double>::quiet_NaN();
  const auto [model, report] =
      axon::train(data, opt.k, g, cfg, [&](const axon::AxonModel& m) {
        final_eval = axon::problems::rel_l2_error(
            [&](std::span<const double> x) { return axon::infer(m, x); },
            problem, grid);
        return final_eval;
      });
  axon::save(model, opt.out);
  const std::string report_path =
      opt.report.empty() ? opt.out + ".report.csv" : opt.report;
  axon::experiment::write_train_report_csv(report_path, report);

  std::cerr << "problem " << problem.name << ": grew "
            << model.num_neurons() << "/" << opt.k << " neurons ("
            << axon::to_string(report.stop_reason)
            << "), train rel_l2 = "
            << (report.iterations.empty()
                    ? report.initial_rel_l2
                    : report.iterations.back().train_rel_l2)
            << ", model -> " << opt.out << ", report -> " << report_path
            << "\n";
  std::cout << axon::csv::format_double(final_eval) << "\n";
  return kExitOk;
}

struct EvalOptions {
  std::string model;
  std::string problem;
  std::size_t grid = 0;
  std::string dump;
};

int cmd_eval(const EvalOptions& opt) {
  const auto list = axon::problems::catalog();
  const auto& problem = require_problem(list, opt.problem);
  const axon::AxonModel model = axon::load(opt.model);
  if (model.d != problem.d)
    throw UsageError("model dimension (" + std::to_string(model.d) +
                     ") does not match problem dimension (" +
                     std::to_string(problem.d) + ")");
  const std::size_t grid =
      opt.grid > 0 ? opt.grid : axon::problems::default_eval_grid(problem.d);
  const double err = axon::problems::rel_l2_error(
      [&](std::span<const double> x) { return axon::infer(model, x); },
      problem, grid);
  if (!opt.dump.empty()) {
    axon::csv::Writer out(opt.dump);
    std::vector<std::string> header;
    header.push_back("x");
    if (problem.d == 2) header.push_back("y");
    header.push_back("f");
    header.push_back("f_K");
    out.row(header);
    for (const auto& x : axon::problems::eval_points(problem, grid)) {
      std::vector<std::string> fields;
      for (double xi : x) fields.push_back(axon::csv::format_double(xi));
      fields.push_back(axon::csv::format_double(problem.target(x)));
      fields.push_back(axon::csv::format_double(axon::infer(model, x)));
      out.row(fields);
    }
    out.close();
  }
  std::cout << axon::csv::format_double(err) << "\n";
  return kExitOk;
}

struct ExperimentOptions {
  axon::experiment::ExperimentConfig cfg;
  std::string methods_csv = "axon,baseline";
  std::string optimizer = "adam";
};

int cmd_experiment(ExperimentOptions& opt) {
  const auto list = axon::problems::catalog();
  const auto& problem = require_problem(list, opt.cfg.problem);
  opt.cfg.methods = split_methods(opt.methods_csv);
  if (opt.cfg.methods.empty()) throw UsageError("no methods given");
  for (const auto& m : opt.cfg.methods) {
    if (m != "axon" && m != "baseline" && m != "yarotsky")
      throw UsageError("unknown method '" + m +
                       "' (expected axon, baseline or yarotsky)");
    if (m == "yarotsky" && opt.cfg.problem != "x2")
      throw UsageError("the yarotsky method only applies to problem x2");
  }
  if (opt.optimizer == "adam")
    opt.cfg.base.optimizer = axon::baseline::BaselineConfig::Optimizer::adam;
  else if (opt.optimizer == "gd")
    opt.cfg.base.optimizer = axon::baseline::BaselineConfig::Optimizer::gd;
  else
    throw UsageError("unknown optimizer '" + opt.optimizer + "'");
  opt.cfg.base.seed = opt.cfg.seed;

  std::filesystem::create_directories(opt.cfg.out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(opt.cfg.out_dir) / name).string();
  };

  axon::experiment::ExperimentReport report;
  const std::size_t grid = opt.cfg.eval_grid > 0
                               ? opt.cfg.eval_grid
                               : axon::problems::default_eval_grid(problem.d);
  bool failed = false;
  std::string failure;
  try {
    axon::experiment::run(opt.cfg, problem, report);
  } catch (const std::exception& e) {
    failed = true;
    failure = e.what();
  }
  // Flush whatever was computed, then report the failure if any.
  axon::experiment::write_errors_csv(path("errors.csv"), report);
  axon::experiment::write_basis_csv(path("basis.csv"), report, problem, grid);
  if (!report.baseline_losses.empty())
    axon::experiment::write_baseline_losses_csv(path("baseline_restarts.csv"),
                                                report);
  axon::experiment::write_errors_svg(path("errors.svg"), report);
  axon::experiment::write_config_echo(path("config.json"), report);

  for (const auto& row : report.rows)
    std::cerr << row.method << " K=" << row.k
              << " rel_l2=" << axon::csv::format_double(row.rel_l2) << " ("
              << row.wall_time_ms << " ms)\n";
  if (failed) {
    std::cerr << "experiment aborted after flushing partial results: "
              << failure << "\n";
    return kExitRuntime;
  }
  if (report.comparison_checked) {
    std::cout << "comparison at K=" << report.comparison_k << ": axon "
              << axon::csv::format_double(report.comparison_axon)
              << " vs baseline "
              << axon::csv::format_double(report.comparison_baseline)
              << " -> expectation (baseline worse than axon) "
              << (report.comparison_met ? "MET" : "NOT MET") << "\n";
    if (!report.comparison_met)
      std::cout << "WARNING: random-init baseline beat the greedy model at K="
                << report.comparison_k << "\n";
  }
  std::cout << "wrote " << path("errors.csv") << "\n";
  return kExitOk;
}

struct YarotskyOptions {
  std::size_t m_max = 12;
  std::size_t grid = (std::size_t{1} << 17) + 1;
  std::string out_dir = ".";
};

int cmd_yarotsky(const YarotskyOptions& opt) {
  const auto table = axon::yarotsky::verify_bound(opt.m_max, opt.grid);
  std::filesystem::create_directories(opt.out_dir);
  const std::string csv_path =
      (std::filesystem::path(opt.out_dir) / "yarotsky.csv").string();
  axon::csv::Writer out(csv_path);
  out.row({"m", "bound", "max_error", "ratio"});
  for (const auto& row : table) {
    const double ratio = row.max_error / row.bound;
    out.row({std::to_string(row.m), axon::csv::format_double(row.bound),
             axon::csv::format_double(row.max_error),
             axon::csv::format_double(ratio)});
    std::cout << "m=" << row.m << " bound=" << row.bound
              << " max_error=" << row.max_error << " ratio=" << ratio << "\n";
  }
  out.close();
  std::cerr << "wrote " << csv_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "axon: greedy one-neuron-at-a-time network growth for regression"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  auto* train_cmd =
      app.add_subcommand("train", "train a model on a catalog problem");
  train_cmd->add_option("--problem", train_opt.problem, "problem name")
      ->required();
  train_cmd->add_option("--k", train_opt.k, "number of neurons to grow")
      ->required()
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--n", train_opt.n, "training-set size (0 = default)");
  train_cmd->add_option("--seed", train_opt.seed, "root seed");
  train_cmd->add_option("--restarts", train_opt.restarts,
                        "inner-solver restarts")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--max-iters", train_opt.max_iters,
                        "inner-solver ascent iteration cap")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--tol", train_opt.tol, "inner-solver convergence tol");
  train_cmd->add_option("--activation", train_opt.activation,
                        "relu | leaky_relu | identity");
  train_cmd->add_option("--slope", train_opt.slope, "leaky_relu slope");
  train_cmd->add_option("--eval-grid", train_opt.eval_grid,
                        "evaluation grid size (0 = default)");
  train_cmd->add_option("--out", train_opt.out, "model output path")
      ->required();
  train_cmd->add_option("--report", train_opt.report,
                        "training-report CSV path (default <out>.report.csv)");

  EvalOptions eval_opt;
  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate a saved model on a dense grid");
  eval_cmd->add_option("--model", eval_opt.model, "model file")->required();
  eval_cmd->add_option("--problem", eval_opt.problem, "problem name")
      ->required();
  eval_cmd->add_option("--grid", eval_opt.grid, "grid size (0 = default)");
  eval_cmd->add_option("--dump", eval_opt.dump,
                       "write (x, f, f_K) samples to this CSV");

  ExperimentOptions exp_opt;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "error-vs-size curves for the configured methods");
  exp_cmd->add_option("--problem", exp_opt.cfg.problem, "problem name")
      ->required();
  exp_cmd->add_option("--kmax", exp_opt.cfg.k_max, "largest model size")
      ->required()
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--methods", exp_opt.methods_csv,
                      "comma list: axon,baseline,yarotsky");
  exp_cmd->add_option("--seed", exp_opt.cfg.seed, "root seed");
  exp_cmd->add_option("--n", exp_opt.cfg.n, "training-set size (0 = default)");
  exp_cmd->add_option("--eval-grid", exp_opt.cfg.eval_grid,
                      "evaluation grid size (0 = default)");
  exp_cmd->add_option("--activation", exp_opt.cfg.activation,
                      "relu | leaky_relu | identity");
  exp_cmd->add_option("--slope", exp_opt.cfg.leaky_slope, "leaky_relu slope");
  exp_cmd->add_option("--solver-restarts", exp_opt.cfg.solver_restarts,
                      "inner-solver restarts")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--max-iters", exp_opt.cfg.solver_max_iters,
                      "inner-solver ascent iteration cap")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--tol", exp_opt.cfg.solver_tol,
                      "inner-solver convergence tol");
  exp_cmd->add_option("--restarts", exp_opt.cfg.base.restarts,
                      "baseline random restarts")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--epochs", exp_opt.cfg.base.epochs, "baseline epochs")
      ->check(CLI::NonNegativeNumber);
  exp_cmd->add_option("--lr", exp_opt.cfg.base.learning_rate,
                      "baseline learning rate");
  exp_cmd->add_option("--optimizer", exp_opt.optimizer, "adam | gd");
  exp_cmd->add_flag("--backtracking", exp_opt.cfg.base.backtracking,
                    "line search for plain gd");
  exp_cmd->add_option("--init-scale", exp_opt.cfg.base.init_scale,
                      "baseline init stddev");
  exp_cmd->add_option("--batch-size", exp_opt.cfg.base.batch_size,
                      "baseline batch size (0 = full batch)");
  exp_cmd->add_option("--baseline-stride", exp_opt.cfg.baseline_stride,
                      "baseline runs at K = 0, s, 2s, ..., kmax")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--out-dir", exp_opt.cfg.out_dir, "output directory");

  YarotskyOptions yar_opt;
  auto* yar_cmd = app.add_subcommand(
      "yarotsky", "max-error table of the explicit x^2 construction");
  yar_cmd->add_option("--mmax", yar_opt.m_max, "largest depth")
      ->check(CLI::PositiveNumber);
  yar_cmd->add_option("--grid", yar_opt.grid, "verification grid size");
  yar_cmd->add_option("--out-dir", yar_opt.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_opt);
    if (eval_cmd->parsed()) return cmd_eval(eval_opt);
    if (exp_cmd->parsed()) return cmd_experiment(exp_opt);
    if (yar_cmd->parsed()) return cmd_yarotsky(yar_opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const axon::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
