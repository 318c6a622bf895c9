#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "axon/activation.hpp"
#include "axon/inner_opt.hpp"
#include "axon/matrix.hpp"
#include "axon/qr.hpp"
#include "axon/rng.hpp"

using axon::Activation;
using axon::Rng;
using axon::inner_opt::InnerObjective;
using axon::inner_opt::SolverConfig;
using axon::linalg::Matrix;

namespace {

Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix v(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) v(i, j) = rng.normal();
  return axon::linalg::thin_qr(v).Q;
}

std::vector<double> random_residual(const Matrix& q, Rng& rng) {
  std::vector<double> y(q.rows());
  for (auto& x : y) x = rng.normal();
  return axon::linalg::project_residual(q, y);
}

/// Planted instance: r is the component of g(Q w*) outside span(Q), scaled to
/// norm `scale`, so J(w*) = scale * |(I-QQ^T)g(Qw*)| / |g(Qw*)| by direct
/// evaluation.
struct Planted {
  Matrix q;
  std::vector<double> w_star;
  std::vector<double> r;
  double expected_j = 0.0;
};

Planted make_planted(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
  for (;;) {
    Planted p;
    p.q = random_orthonormal(rows, cols, rng);
    p.w_star = rng.unit_sphere(cols);
    std::vector<double> u = axon::linalg::matvec(p.q, p.w_star);
    for (auto& z : u) z = std::max(z, 0.0);
    const double u_norm = axon::linalg::norm2(u);
    auto outside = axon::linalg::project_residual(p.q, u);
    const double out_norm = axon::linalg::norm2(outside);
    if (u_norm < 1e-6 || out_norm < 1e-3 * u_norm) continue;  // degenerate draw
    for (auto& x : outside) x *= scale / out_norm;
    p.r = std::move(outside);
    p.expected_j = scale * out_norm / u_norm;
    return p;
  }
}

}  // namespace

TEST_CASE("identity activation cannot align with an orthogonal residual") {
  Rng rng(2);
  const Matrix q = random_orthonormal(40, 3, rng);
  auto r = random_residual(q, rng);
  const double r_norm = axon::linalg::norm2(r);
  InnerObjective obj(q, std::move(r), Activation::identity());
  for (int t = 0; t < 20; ++t) {
    const auto w = rng.unit_sphere(3);
    CHECK(axon::inner_opt::objective(obj, w) <= 1e-12 * r_norm);
  }
}

TEST_CASE("vanishing activation output is guarded to zero") {
  Matrix q(5, 1);
  for (std::size_t i = 0; i < 5; ++i) q(i, 0) = 1.0 / std::sqrt(5.0);
  std::vector<double> r{1.0, -1.0, 1.0, -1.0, 0.0};
  r = axon::linalg::project_residual(q, r);
  InnerObjective obj(q, std::move(r), Activation::relu());
  const std::vector<double> w{-1.0};  // relu(Qw) = 0 everywhere
  CHECK(axon::inner_opt::objective(obj, w) == 0.0);
}

TEST_CASE("planted objective value matches direct evaluation") {
  Rng rng(5);
  for (double scale : {0.5, 3.0}) {
    const Planted p = make_planted(60, 4, scale, rng);
    InnerObjective obj(p.q, p.r, Activation::relu());
    CHECK(axon::inner_opt::objective(obj, p.w_star) ==
          Catch::Approx(p.expected_j).epsilon(1e-12));
  }
}

TEST_CASE("ReLU simplified form equals the generic objective") {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const Matrix q = random_orthonormal(20, 3, rng);
    auto r = random_residual(q, rng);
    const double r_norm = axon::linalg::norm2(r);
    InnerObjective obj(q, std::move(r), Activation::relu());
    const auto w = rng.unit_sphere(3);
    const double a = axon::inner_opt::objective(obj, w);
    const double b = axon::inner_opt::objective_relu_simplified(obj, w);
    CHECK(std::abs(a - b) <= 1e-12 * r_norm);
  }
}

TEST_CASE("simplified form rejects non-ReLU activations") {
  Rng rng(4);
  const Matrix q = random_orthonormal(10, 2, rng);
  auto r = random_residual(q, rng);
  InnerObjective obj(q, std::move(r), Activation::leaky_relu(0.1));
  CHECK_THROWS_AS(
      axon::inner_opt::objective_relu_simplified(obj, rng.unit_sphere(2)),
      axon::NotReLU);
}

TEST_CASE("objective is invariant under positive scaling of w") {
  Rng rng(13);
  const Matrix q = random_orthonormal(30, 4, rng);
  auto r = random_residual(q, rng);
  InnerObjective obj(q, std::move(r), Activation::relu());
  for (int t = 0; t < 10; ++t) {
    const auto w = rng.unit_sphere(4);
    const double j1 = axon::inner_opt::objective(obj, w);
    for (double c : {0.5, 2.0}) {
      std::vector<double> scaled = w;
      for (auto& x : scaled) x *= c;
      CHECK(axon::inner_opt::objective(obj, scaled) ==
            Catch::Approx(j1).epsilon(1e-12).margin(1e-300));
    }
  }
}

TEST_CASE("gradient matches central finite differences away from kinks") {
  Rng rng(21);
  const Matrix q = random_orthonormal(30, 4, rng);
  auto r = random_residual(q, rng);
  const double r_norm = axon::linalg::norm2(r);
  InnerObjective obj(q, std::move(r), Activation::relu());
  const double h = 1e-6;
  int checked = 0;
  for (int t = 0; t < 60 && checked < 10; ++t) {
    const auto w = rng.unit_sphere(4);
    const auto u = axon::linalg::matvec(q, w);
    bool near_kink = false;
    for (double z : u) near_kink |= std::abs(z) < 1e-4;
    if (near_kink) continue;
    if (axon::inner_opt::objective(obj, w) < 1e-3 * r_norm) continue;
    const auto grad = axon::inner_opt::objective_gradient(obj, w);
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<double> wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const double fd = (axon::inner_opt::objective(obj, wp) -
                         axon::inner_opt::objective(obj, wm)) /
                        (2.0 * h);
      CHECK(grad[j] == Catch::Approx(fd).epsilon(1e-5).margin(1e-10 * r_norm));
    }
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("maximize is deterministic and monotone in the restart budget") {
  Rng rng(31);
  const Planted p = make_planted(50, 3, 1.0, rng);
  InnerObjective obj(p.q, p.r, Activation::relu());
  SolverConfig cfg;
  cfg.seed = 99;

  const auto a = axon::inner_opt::maximize(obj, cfg);
  const auto b = axon::inner_opt::maximize(obj, cfg);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.w == b.w);
  CHECK(a.restarts_used == cfg.restarts);

  double previous = 0.0;
  for (int restarts : {4, 8, 16, 32}) {
    SolverConfig c2 = cfg;
    c2.restarts = restarts;
    const auto sol = axon::inner_opt::maximize(obj, c2);
    CHECK(sol.objective_value >= previous);
    previous = sol.objective_value;
  }
}

TEST_CASE("maximize recovers planted optima") {
  Rng rng(41);
  int hits = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Planted p = make_planted(40, 4, 2.0, rng);
    InnerObjective obj(p.q, p.r, Activation::relu());
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto sol = axon::inner_opt::maximize(obj, cfg);
    if (sol.objective_value >= p.expected_j - 1e-6 * axon::linalg::norm2(p.r))
      ++hits;
  }
  CHECK(hits >= 9);
}

TEST_CASE("one-column all-positive basis admits no ascent under ReLU") {
  Matrix q(8, 1);
  for (std::size_t i = 0; i < 8; ++i) q(i, 0) = 1.0 / std::sqrt(8.0);
  std::vector<double> y(8);
  Rng rng(6);
  for (auto& x : y) x = rng.normal();
  auto r = axon::linalg::project_residual(q, y);
  InnerObjective obj(q, std::move(r), Activation::relu());
  SolverConfig cfg;
  CHECK_THROWS_AS(axon::inner_opt::maximize(obj, cfg), axon::NoAscent);
}

TEST_CASE("one-column mixed-sign basis reduces to a two-point enumeration") {
  // On S^0 the tangent space is trivial, so the solver can only report the
  // better of the two candidate directions w = +1 and w = -1.
  const std::size_t n = 16;
  Matrix q(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    q(i, 0) = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n));
  Rng rng(8);
  std::vector<double> y(n);
  for (auto& x : y) x = rng.normal();
  auto r = axon::linalg::project_residual(q, y);
  InnerObjective obj(q, std::move(r), Activation::relu());

  const std::vector<double> plus{1.0}, minus{-1.0};
  const double expected = std::max(axon::inner_opt::objective(obj, plus),
                                   axon::inner_opt::objective(obj, minus));
  SolverConfig cfg;
  const auto sol = axon::inner_opt::maximize(obj, cfg);
  CHECK(sol.objective_value == Catch::Approx(expected).epsilon(1e-14));
}

TEST_CASE("scaling the residual scales the objective, not the argmax") {
  Rng rng(51);
  const Planted p = make_planted(40, 3, 1.0, rng);
  SolverConfig cfg;
  cfg.seed = 7;

  InnerObjective obj(p.q, p.r, Activation::relu());
  const auto sol1 = axon::inner_opt::maximize(obj, cfg);

  std::vector<double> r10 = p.r;
  for (auto& x : r10) x *= 10.0;
  InnerObjective obj10(p.q, std::move(r10), Activation::relu());
  const auto sol10 = axon::inner_opt::maximize(obj10, cfg);

  CHECK(sol10.objective_value ==
        Catch::Approx(10.0 * sol1.objective_value).epsilon(1e-12));
  for (std::size_t j = 0; j < sol1.w.size(); ++j)
    CHECK(sol10.w[j] == Catch::Approx(sol1.w[j]).margin(1e-6));
}
