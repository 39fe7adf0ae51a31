#include <doctest.h>

#include <cmath>
#include <numbers>

#include "psl/errors.hpp"
#include "psl/quadrature.hpp"
#include "psl/special.hpp"

using namespace psl;
using std::numbers::pi;

TEST_CASE("dawson function matches reference values") {
  const std::pair<double, double> table[] = {
      {0.1, 0.0993359923978529},  {0.2, 0.19475103336802793}, {0.5, 0.4244363835020223},
      {1.0, 0.5380795069127684},  {1.5, 0.42824907108539867}, {2.0, 0.301340388923792},
      {3.0, 0.17827103061055827}, {5.0, 0.10213407442427686}, {10.0, 0.05025384718759854},
      {50.0, 0.010002001201201684}};
  for (const auto& [x, f] : table) {
    CHECK(dawson(x) == doctest::Approx(f).epsilon(1e-13));
    CHECK(dawson(-x) == doctest::Approx(-f).epsilon(1e-13));
  }
  CHECK(dawson(0.0) == 0.0);
  CHECK(dawson(1e5) == doctest::Approx(0.5e-5).epsilon(1e-9));
}

TEST_CASE("adaptive Gauss-Kronrod on smooth and oscillatory integrands") {
  const QuadratureSettings s;
  const auto a = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, pi, s);
  CHECK(a.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(a.error <= 1e-9);
  const auto b = integrate_adaptive([](double x) { return cplx(std::cos(50 * x), std::sin(50 * x)); }, 0.0, 1.0, s);
  CHECK(std::abs(b.value - cplx(std::sin(50.0), 1.0 - std::cos(50.0)) / 50.0) <= 1e-12);
}

TEST_CASE("adaptive integration reports exhaustion") {
  QuadratureSettings s;
  s.max_panels = 3;
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, s),
                  NonConvergence);
}

TEST_CASE("envelope integral of a plane wave") {
  const QuadratureSettings s;
  for (double p : {0.5, 1.0, 3.0})
    for (double q : {-1.0, 0.0, 0.7})
      for (double w : {0.0, 1.0, 4.0}) {
        const auto r = integrate_envelope([&](double x) { return std::polar(1.0, w * x); }, p, q, s, w);
        const cplx exact = std::sqrt(pi / p) * std::exp(-w * w / (4 * p)) * std::polar(1.0, -w * q);
        CHECK(std::abs(r.value - exact) <= 1e-12);
        CHECK(std::abs(r.value - exact) <= r.error + 1e-15);
      }
}

TEST_CASE("principal value by subtraction") {
  const QuadratureSettings s;
  const double a = 0.5;
  const auto r = pv_integral([](double k) { return k * k; }, a, -1.0, 2.0, s);
  const double exact = (4.0 - 1.0) / 2.0 + a * 3.0 + a * a * std::log((2.0 - a) / (a + 1.0));
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
  CHECK_THROWS_AS(pv_integral([](double) { return 1.0; }, 3.0, -1.0, 2.0, s), PoleOutsideRange);
}

TEST_CASE("Hilbert transform of a Gaussian from grid samples") {
  // PV int exp(-k^2)/(k - x) dk = -2 sqrt(pi) F(x).
  const auto grid = UniformGrid::symmetric(12.0, 961);
  std::vector<double> f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f[i] = std::exp(-grid[i] * grid[i]);
  const TailDecay tail{1.0, 0.0, 1.0, 0.0};
  for (double x : {0.0, 0.3, 1.0, 2.5, -3.1, 0.0125}) {
    const auto h = hilbert_on_grid(grid, f, x, tail, {});
    const double exact = -2.0 * std::sqrt(pi) * dawson(x);
    CHECK(std::abs(h.value - exact) <= 5e-8);
    CHECK(std::abs(h.value - exact) <= h.error_budget);
  }
  CHECK(hilbert_on_grid(grid, f, 1.0, tail, {}).value ==
        doctest::Approx(-1.907442188241755).epsilon(1e-8));
}

TEST_CASE("Hilbert transform refuses a grid that clips the function") {
  const auto grid = UniformGrid::symmetric(2.0, 161);
  std::vector<double> f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f[i] = std::exp(-grid[i] * grid[i]);
  CHECK_THROWS_AS(hilbert_on_grid(grid, f, 0.0, {1.0, 0.0, 1.0, 0.0}, {}), InsufficientSpan);
  CHECK_THROWS_AS(hilbert_on_grid(UniformGrid::symmetric(12.0, 961), std::vector<double>(961, 0.0), 20.0,
                                  {1.0, 0.0, 1.0, 0.0}, {}),
                  PoleOutsideRange);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int order : {4, 12, 20}) {
    const auto gl = gauss_legendre(order);
    for (int deg = 0; deg < 2 * order; ++deg) {
      double sum = 0;
      for (int i = 0; i < order; ++i) sum += gl.weights[i] * std::pow(gl.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("ordered double integral of the bare envelope is half the square") {
  const QuadratureSettings s;
  for (double p : {0.5, 1.0, 2.0}) {
    const auto r = ordered_double_integral([](double) { return cplx(1.0); }, [](double) { return cplx(1.0); }, p,
                                           0.3, s);
    CHECK(r.value.real() == doctest::Approx(pi / (2 * p)).epsilon(1e-12));
    CHECK(std::abs(r.value.imag()) <= 1e-14);
  }
}

TEST_CASE("ordered double integral of plane waves") {
  // Im of ordered(e^{i w xi}, e^{-i w zeta}) with p = 1 is sqrt(pi) F(w / sqrt 2).
  const double w = 1.0;
  const auto r = ordered_double_integral([&](double x) { return std::polar(1.0, w * x); },
                                         [&](double z) { return std::polar(1.0, -w * z); }, 1.0, 0.0, {}, 2 * w);
  CHECK(r.value.imag() == doctest::Approx(0.9083750890953115).epsilon(1e-10));
  CHECK(r.value.imag() == doctest::Approx(std::sqrt(pi) * dawson(w / std::sqrt(2.0))).epsilon(1e-10));
}

TEST_CASE("uniform grid validation") {
  CHECK_THROWS_AS(UniformGrid(0.0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(UniformGrid(1.0, 0.0, 5), ValidationError);
  const UniformGrid g(-1.0, 1.0, 5);
  CHECK(g[4] == 1.0);
  CHECK(g.step() == 0.5);
}

TEST_CASE("pole just off a node stays accurate") {
  const auto grid = UniformGrid::symmetric(12.0, 1921);
  std::vector<double> f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f[i] = std::exp(-(grid[i] - 0.3) * (grid[i] - 0.3));
  const TailDecay tail{1.0, 0.3, 1.0, 0.0};
  for (double offset : {0.0, 1e-9, 1e-7, 1e-6, 2.4e-5, 3e-3}) {
    const double x = grid[960] + offset;
    const auto h = hilbert_on_grid(grid, f, x, tail, {});
    const double exact = -2.0 * std::sqrt(pi) * dawson(x - 0.3);
    CHECK(std::abs(h.value - exact) <= h.error_budget);
    CHECK(std::abs(h.value - exact) <= 1e-9);
  }
}

TEST_CASE("exponentially decaying samples: tail is measured, not assumed") {
  // sech decays like 2 exp(-|k|), far slower than the Gaussian descriptor claims.
  auto sech = [](double k) { return 1.0 / std::cosh(k); };
  const TailDecay gaussian{1.0, 0.0, 1.0, 0.0};
  const auto narrow = UniformGrid::symmetric(20.0, 1601);
  std::vector<double> f(narrow.size());
  for (int i = 0; i < narrow.size(); ++i) f[i] = sech(narrow[i]);
  CHECK_THROWS_AS(hilbert_on_grid(narrow, f, 0.5, gaussian, {}), InsufficientSpan);

  const auto wide = UniformGrid::symmetric(45.0, 3601);
  f.resize(wide.size());
  for (int i = 0; i < wide.size(); ++i) f[i] = sech(wide[i]);
  for (double x : {0.5, -2.0}) {
    const auto h = hilbert_on_grid(wide, f, x, gaussian, {});
    const auto ref = pv_integral(sech, x, -80.0, 80.0, {});
    CHECK(std::abs(h.value - ref.value) <= h.error_budget + ref.error);
    CHECK(std::abs(h.value - ref.value) <= 1e-8);
  }
}
