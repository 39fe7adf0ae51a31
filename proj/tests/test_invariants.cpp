#include <doctest.h>

#include <cmath>
#include <numbers>

#include "psl/errors.hpp"
#include "psl/invariants.hpp"
#include "psl/special.hpp"
#include "support.hpp"

using namespace psl;
using std::numbers::pi;

TEST_CASE("flat profile invariants have Gaussian and Dawson closed forms") {
  const StringState s;
  for (double w : {0.0, 0.5, 1.0, 2.0, -1.5}) {
    const auto inv = invariant_set(s, w);
    CHECK(testing::rel_err(inv.JP, pi / 4 * std::exp(-w * w / 2)) <= 1e-12);
    const double js = -std::sqrt(pi) / 2 * dawson(w / std::sqrt(2.0));
    CHECK(std::abs(inv.JS - js) <= 1e-12 * std::max(1.0, std::abs(js)));
  }
  CHECK(invariant_set(s, 0.0).I0.real() == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-14));
  // Frozen reference values.
  CHECK(invariant_set(s, 2.0).I0.real() == doctest::Approx(0.3260246660866461).epsilon(1e-12));
  CHECK(invariant_set(s, 1.0).JS == doctest::Approx(-0.45418754454765575).epsilon(1e-11));
  CHECK(invariant_set(s, 0.5).JP == doctest::Approx(0.693111446493878).epsilon(1e-12));
}

TEST_CASE("ordered integrals agree with a brute-force Riemann oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 4; ++trial) {
    const auto s = testing::random_state(rng);
    for (double w : {-1.0, 0.7}) {
      const auto oracle = testing::brute_force_invariants(s, w);
      const auto inv = invariant_set(s, w);
      CHECK(std::abs(inv.JP - oracle.JP) <= 1e-8 * std::max(1.0, oracle.JP));
      CHECK(std::abs(inv.JS - oracle.JS) <= 1e-8 * std::max(1.0, std::abs(oracle.JS)));
    }
  }
}

TEST_CASE("JP equals |I0|^2 along the double-integral path") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = testing::random_state(rng);
    for (double w : {-2.0, 0.0, 1.3}) {
      const double jp = std::norm(compute_I0(s, w).value);
      CHECK(testing::rel_err(jp_double_integral(s, w).value, jp) <= 1e-8);
    }
  }
}

TEST_CASE("reversing the order flips JS; g ignores beta, kappa and Z") {
  std::mt19937_64 rng(3);
  auto s = testing::random_state(rng);
  const double w = 0.9;
  CHECK(compute_JS(s, w, {}, true).value == doctest::Approx(-compute_JS(s, w).value).epsilon(1e-10));
  const cplx g = compute_g(s, w);
  s.beta += 1.1;
  s.kappa *= 3.0;
  s.Z += cplx(5.0, -2.0);
  CHECK(std::abs(compute_g(s, w) - g) <= 1e-13);
}

TEST_CASE("physical invariants scale with gamma and kappa") {
  std::mt19937_64 rng(5);
  const auto s = testing::random_state(rng);
  const auto inv = invariant_set(s, s.omega);
  const double gk = s.constants.gamma * s.kappa;
  CHECK(std::abs(inv.momentum - gk * inv.I0) <= 1e-15 * std::abs(inv.momentum) + 1e-300);
  CHECK(inv.P2 == doctest::Approx(gk * gk * inv.JP).epsilon(1e-14));
  CHECK(inv.S == doctest::Approx(0.5 * s.constants.gamma * s.kappa * s.kappa * inv.JS).epsilon(1e-14));
  CHECK(std::norm(inv.momentum) == doctest::Approx(inv.P2).epsilon(1e-14));
}

TEST_CASE("sweep matches pointwise evaluation and rejects unordered grids") {
  std::mt19937_64 rng(9);
  const auto s = testing::random_state(rng);
  const std::vector<double> grid{-1.0, 0.0, 0.5, 2.0};
  const auto sweep = invariant_sweep(s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(sweep[i].JS == invariant_set(s, grid[i]).JS);
  CHECK_THROWS_AS(invariant_sweep(s, {0.0, 0.0}), ValidationError);
}

TEST_CASE("state validation names the field") {
  StringState s;
  s.p = 0.0;
  try {
    s.normalized();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "state.p");
  }
  s.p = 1.0;
  s.constants.m0 = -1.0;
  CHECK_THROWS_AS(s.normalized(), ValidationError);
  s.constants.m0 = 1.0;
  s.beta = -0.5;
  CHECK(s.normalized().beta == doctest::Approx(2 * pi - 0.5));
}
