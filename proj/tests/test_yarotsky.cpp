#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "axon/yarotsky.hpp"

using axon::yarotsky::YarotskyApproximant;
using axon::yarotsky::hat;
using axon::yarotsky::sawtooth;

namespace {

double relu(double z) { return z > 0.0 ? z : 0.0; }

double hat_via_relu(double x) {
  return 2.0 * relu(x) - 4.0 * relu(x - 0.5) + 2.0 * relu(x - 1.0);
}

}  // namespace

TEST_CASE("hat matches its piecewise definition") {
  CHECK(hat(0.25) == 0.5);
  CHECK(hat(0.5) == 1.0);
  CHECK(hat(1.2) == 0.0);
  CHECK(hat(-0.1) == 0.0);
  CHECK(hat_via_relu(0.75) == Catch::Approx(0.5).margin(1e-15));
  CHECK(hat(hat(0.125)) == 0.5);
}

TEST_CASE("hat equals the one-layer ReLU form on [0, 1]") {
  for (int i = 0; i <= 10000; ++i) {
    const double x = static_cast<double>(i) / 10000.0;
    CHECK(std::abs(hat(x) - hat_via_relu(x)) <= 1e-15);
  }
}

TEST_CASE("sawtooth hits 0/1 on its dyadic grid") {
  for (std::size_t s = 1; s <= 10; ++s) {
    const double denom = std::pow(2.0, static_cast<double>(s));
    for (std::size_t j = 0; j <= (std::size_t{1} << s); ++j) {
      const double x = static_cast<double>(j) / denom;
      const double expected = (j % 2 == 1) ? 1.0 : 0.0;
      CHECK(sawtooth(x, s) == expected);
    }
  }
}

TEST_CASE("f_m interpolates x^2 at dyadic nodes") {
  const YarotskyApproximant f1(1);
  CHECK(f1(0.5) == Catch::Approx(0.25).margin(1e-16));
  const YarotskyApproximant f3(3);
  for (int k = 0; k <= 8; ++k) {
    const double x = static_cast<double>(k) / 8.0;
    CHECK(std::abs(f3(x) - x * x) <= 1e-15);
  }
}

TEST_CASE("f_m rejects out-of-domain input") {
  const YarotskyApproximant f2(2);
  CHECK_THROWS_AS(f2(-0.01), axon::DomainError);
  CHECK_THROWS_AS(f2(1.01), axon::DomainError);
}

TEST_CASE("depth-3 max error sits just below its bound") {
  const YarotskyApproximant f3(3);
  const std::size_t grid = (std::size_t{1} << 17) + 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid - 1);
    worst = std::max(worst, std::abs(x * x - f3(x)));
  }
  const double bound = 0.00390625;  // 2^-8
  CHECK(worst <= bound + 1e-15);
  CHECK(worst >= 0.9 * bound);
}

TEST_CASE("verify_bound tabulates the theorem and the quarter decay") {
  const auto table = axon::yarotsky::verify_bound(10, (std::size_t{1} << 14) + 1);
  REQUIRE(table.size() == 10);
  CHECK(table[0].bound == Catch::Approx(0.0625));
  CHECK(table[9].bound == Catch::Approx(std::pow(2.0, -22.0)));
  for (const auto& row : table) {
    CHECK(row.max_error <= row.bound + 1e-12);
    CHECK(row.max_error >= 0.9 * row.bound);
  }
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const double ratio = table[i + 1].max_error / table[i].max_error;
    CHECK(ratio == Catch::Approx(0.25).epsilon(0.05));
  }
}

TEST_CASE("verify_bound insists on a grid that resolves the midpoints") {
  CHECK_THROWS_AS(axon::yarotsky::verify_bound(10, 1000), std::invalid_argument);
}

TEST_CASE("reference basis combines to f_m") {
  const auto basis = axon::yarotsky::as_reference_basis(2);
  CHECK(axon::yarotsky::as_reference_basis(1).count() == 2);
  const auto at = basis.values(0.25);
  const auto coeff = basis.coefficients();
  REQUIRE(at.size() == 3);
  CHECK(at[0] == 0.25);
  CHECK(at[1] == 0.5);
  CHECK(at[2] == 1.0);
  double combo = 0.0;
  for (std::size_t i = 0; i < at.size(); ++i) combo += coeff[i] * at[i];
  CHECK(combo == Catch::Approx(0.0625).margin(1e-16));

  const YarotskyApproximant f4(4);
  const auto basis4 = axon::yarotsky::as_reference_basis(4);
  const auto coeff4 = basis4.coefficients();
  for (int i = 0; i <= 1000; ++i) {
    const double x = static_cast<double>(i) / 1000.0;
    const auto values = basis4.values(x);
    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) sum += coeff4[j] * values[j];
    CHECK(std::abs(sum - f4(x)) <= 1e-14);
  }
}
