#include "psl/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace psl {

namespace {

constexpr double kStep = 0.2;
constexpr int kTerms = 40; // odd offsets n = 1, 3, ..., 2*kTerms-1 on each side

const std::array<double, kTerms>& sample_weights() {
  // exp(-(n h)^2) for odd n, reused by the Rybicki recurrence.
  static const std::array<double, kTerms> w = [] {
    std::array<double, kTerms> out{};
    for (int i = 0; i < kTerms; ++i) {
      const double nh = (2 * i + 1) * kStep;
      out[i] = std::exp(-nh * nh);
    }
    return out;
  }();
  return w;
}

double dawson_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 1; k < 30; ++k) {
    term *= -2.0 * x2 / (2 * k + 1);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double dawson_asymptotic(double x) {
  const double y = 1.0 / (2.0 * x * x);
  // 1/(2x) * sum_k (2k-1)!! y^k
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 8; ++k) {
    term *= (2 * k - 1) * y;
    sum += term;
  }
  return sum / (2.0 * x);
}

} // namespace

double dawson(double x) {
  const double ax = std::abs(x);
  if (ax < 0.2) return dawson_series(x);
  if (ax > 1e3) return dawson_asymptotic(x);

  // F(x) ~ (1/sqrt(pi)) sum_{n odd} exp(-(xi - n h)^2) / (n + n0), x = n0 h + xi, n0 even.
  const auto& w = sample_weights();
  const int n0 = 2 * static_cast<int>(std::lround(0.5 * ax / kStep));
  const double xi = ax - n0 * kStep;
  const double e1 = std::exp(2.0 * xi * kStep);
  const double e2 = e1 * e1;
  double d1 = n0 + 1;
  double d2 = d1 - 2.0;
  double grow = e1;
  double shrink = 1.0 / e1;
  double sum = 0.0;
  for (int i = 0; i < kTerms; ++i) {
    sum += w[i] * (grow / d1 + shrink / d2);
    d1 += 2.0;
    d2 -= 2.0;
    grow *= e2;
    shrink /= e2;
  }
  const double f = std::exp(-xi * xi) * sum / std::sqrt(std::numbers::pi);
  return std::copysign(f, x);
}

} // namespace psl
