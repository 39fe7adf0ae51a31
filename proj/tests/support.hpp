#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "psl/invariants.hpp"

namespace psl::testing {

inline Profile random_profile(std::mt19937_64& rng, int min_bumps = 1, int max_bumps = 3) {
  std::uniform_int_distribution<int> count(min_bumps, max_bumps);
  std::uniform_real_distribution<double> amp(-0.8, 0.8), centre(-1.5, 1.5), width(0.3, 1.0);
  std::vector<GaussianBump> bumps(count(rng));
  for (auto& b : bumps) b = {amp(rng), centre(rng), width(rng)};
  return Profile(bumps);
}

inline StringState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StringState s;
  s.profile = random_profile(rng);
  s.p = 0.6 + unit(rng);
  s.q = -0.8 + 1.6 * unit(rng);
  s.beta = 2.0 * std::numbers::pi * unit(rng);
  s.kappa = 0.5 + unit(rng);
  s.omega = -2.0 + 4.0 * unit(rng);
  s.Z = {-1.0 + 2.0 * unit(rng), -1.0 + 2.0 * unit(rng)};
  s.constants = {0.5 + 1.5 * unit(rng), 0.5 + 1.5 * unit(rng), 0.5 + 1.5 * unit(rng)};
  return s.normalized();
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Ordered-pair integral by brute force, independent of the library quadrature:
/// A = int e^{i theta(xi)} e(xi) C(xi)* dxi with C the running integral of e^{i theta} e,
/// from cumulative trapezoid sums at steps h and 2h combined by Richardson extrapolation.
/// Returns {JP, JS} with JP = |C(inf)|^2 / 4 and JS = -(1/2) Im A.
struct BruteForce {
  double JP;
  double JS;
};

inline BruteForce brute_force_invariants(const StringState& s, double omega, int n = 8000) {
  const double half = std::sqrt(37.0 / s.p) + 0.5;
  auto run = [&](int m) {
    const double lo = -s.q - half, h = 2.0 * half / m;
    std::vector<std::complex<double>> f(m + 1);
    for (int i = 0; i <= m; ++i) {
      const double x = lo + i * h, d = x + s.q;
      f[i] = std::polar(std::exp(-s.p * d * d), s.phase(omega, x, false));
    }
    std::complex<double> c{}, acc{};
    for (int i = 1; i <= m; ++i) {
      const auto c_prev = c;
      c += 0.5 * h * (f[i - 1] + f[i]);
      acc += 0.5 * h * (f[i - 1] * std::conj(c_prev) + f[i] * std::conj(c));
    }
    return std::pair{c, acc};
  };
  const auto [c1, a1] = run(n);
  const auto [c2, a2] = run(n / 2);
  const auto c = (4.0 * c1 - c2) / 3.0;
  const auto a = (4.0 * a1 - a2) / 3.0;
  return {std::norm(c) / 4.0, -0.5 * a.imag()};
}

} // namespace psl::testing
