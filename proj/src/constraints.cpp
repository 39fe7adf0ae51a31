#include "psl/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "psl/errors.hpp"
#include "psl/parallel.hpp"

namespace psl {

Phi1Result phi1_residual(const StringState& state, double omega, const QuadratureSettings& settings) {
  const auto inv = invariant_set(state, omega, settings);
  const double gamma = state.constants.gamma;
  if (state.kappa == 0.0) return {0.0, 0.0};
  const double jp_double = jp_double_integral(state, omega, settings).value;
  const double a = inv.P2 * inv.JS;
  const double b = 2.0 * gamma * inv.S * jp_double;
  return {a - b, std::abs(a) + std::abs(b)};
}

TailDecay jp_tail(const StringState& state) {
  TailDecay t;
  t.amplitude = std::numbers::pi / (4.0 * state.p);
  t.center = 0.0;
  t.rate = 1.0 / (2.0 * state.p);
  t.offset = 2.0 * state.profile.max_abs_rho();
  return t;
}

UniformGrid dispersion_grid(const StringState& state, const QuadratureSettings& settings, double step) {
  if (!(step > 0.0)) throw ValidationError("numerics.dispersion_step", "must be > 0");
  const auto tail = jp_tail(state);
  auto jp = [&](double w) { return std::norm(compute_I0(state, w, settings).value); };
  // Start from the Gaussian estimate, which is exact for rho == 0, then widen
  // until JP over the outermost unit on both sides is far below truncation.
  double half = tail.offset + std::sqrt(-std::log(settings.truncation_eps) / tail.rate) + 1.0;
  double peak = 0.0;
  for (double w = -half; w <= half; w += 0.25) peak = std::max(peak, jp(w));
  const double target = 1e-2 * settings.truncation_eps * peak;
  constexpr double max_half = 500.0;
  for (;;) {
    double edge = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const double w = half - k / 8.0;
      edge = std::max({edge, jp(w), jp(-w)});
    }
    if (edge <= target) break;
    if (half >= max_half)
      throw InsufficientSpan("JP still " + std::to_string(edge / peak) + " of its peak at |omega| = " +
                             std::to_string(half));
    half = std::min(max_half, 1.25 * half + 1.0);
  }
  const int cells = static_cast<int>(std::ceil(half / step));
  return UniformGrid::symmetric(cells * step, 2 * cells + 1);
}

DispersionSamples sample_dispersion(const StringState& state, const UniformGrid& grid,
                                    const QuadratureSettings& settings) {
  const auto nodes = grid.nodes();
  DispersionSamples out{grid, std::vector<double>(nodes.size()), std::vector<double>(nodes.size()),
                        jp_tail(state)};
  parallel_for(nodes.size(), [&](std::size_t i) {
    const auto i0 = compute_I0(state, nodes[i], settings);
    out.JP[i] = std::norm(i0.value);
    out.JP_error[i] = 2.0 * std::abs(i0.value) * i0.error + i0.error * i0.error;
  });
  return out;
}

ConstraintReport phi2_residual(const StringState& state, double omega, const DispersionSamples& samples,
                               const QuadratureSettings& settings) {
  const auto inv = invariant_set(state, omega, settings);
  const auto h = hilbert_on_grid(samples.grid, samples.JP, omega, samples.tail, settings, samples.JP_error);

  ConstraintReport r;
  r.omega = omega;
  r.dispersion_residual = inv.JS - h.value / std::numbers::pi;
  r.dispersion_budget = inv.JS_error + h.error_budget / std::numbers::pi;
  // S = (gamma kappa^2 / 2) JS and P2 = gamma^2 kappa^2 JP carry the same factor.
  const double scale = 0.5 * state.constants.gamma * state.kappa * state.kappa;
  r.phi2_residual = scale * r.dispersion_residual;
  r.phi2_error_budget = scale * r.dispersion_budget;
  r.phi1_residual = phi1_residual(state, omega, settings).residual;
  return r;
}

ConstraintReport phi2_residual(const StringState& state, double omega, const UniformGrid& grid,
                               const QuadratureSettings& settings) {
  return phi2_residual(state, omega, sample_dispersion(state, grid, settings), settings);
}

namespace {

double principal(double angle) { return std::remainder(angle, 2.0 * std::numbers::pi); }

cplx g_ratio(cplx g, bool conjugate) { return conjugate ? -std::conj(g) / g : -g / std::conj(g); }

} // namespace

WindingResult winding_index(const StringState& state, double omega_max, int n_samples,
                            const QuadratureSettings& settings, bool conjugate) {
  if (!(omega_max > 0.0)) throw ValidationError("index.omega_max", "must be > 0");
  if (n_samples < 3) throw ValidationError("index.n_samples", "must be >= 3");

  struct Sample {
    double omega;
    cplx g;
  };
  std::vector<Sample> samples(n_samples);
  const double step = 2.0 * omega_max / (n_samples - 1);
  parallel_for(samples.size(), [&](std::size_t i) {
    const double w = i + 1 == samples.size() ? omega_max : -omega_max + i * step;
    samples[i] = {w, compute_g(state, w, settings)};
  });

  constexpr double kMaxStep = std::numbers::pi / 2.0;
  constexpr int kMaxDepth = 20;
  WindingResult out;
  out.min_re_g = samples.front().g.real();
  double segment = 0.0;
  int count = 1;

  auto check = [&](const Sample& s) {
    if (std::abs(s.g) == 0.0 || !std::isfinite(std::abs(s.g)))
      throw PhaseUnwrapFailure("g vanishes at omega = " + std::to_string(s.omega));
    out.min_re_g = std::min(out.min_re_g, s.g.real());
  };
  check(samples.front());

  // Accumulates the phase change of G from a to b, bisecting while the step is too large.
  auto accumulate = [&](auto&& self, const Sample& a, const Sample& b, int depth) -> void {
    const double d = principal(std::arg(g_ratio(b.g, conjugate)) - std::arg(g_ratio(a.g, conjugate)));
    if (std::abs(d) < kMaxStep) {
      segment += d;
      ++count;
      return;
    }
    if (depth >= kMaxDepth)
      throw PhaseUnwrapFailure("phase step " + std::to_string(d) + " near omega = " + std::to_string(a.omega) +
                               " after maximal refinement");
    const double mid = 0.5 * (a.omega + b.omega);
    Sample m{mid, compute_g(state, mid, settings)};
    check(m);
    self(self, a, m, depth + 1);
    self(self, m, b, depth + 1);
  };
  for (std::size_t i = 1; i < samples.size(); ++i) {
    check(samples[i]);
    accumulate(accumulate, samples[i - 1], samples[i], 0);
  }

  const double two_pi = 2.0 * std::numbers::pi;
  // G(+-inf) = 1: close from G(omega_max) to 1 and from 1 to G(-omega_max).
  const double closure = -std::arg(g_ratio(samples.back().g, conjugate)) +
                         std::arg(g_ratio(samples.front().g, conjugate));
  out.segment_turns = segment / two_pi;
  out.closure_turns = closure / two_pi;
  out.index = static_cast<int>(std::lround(out.segment_turns + out.closure_turns));
  out.samples = count;
  if (std::abs(out.segment_turns - out.index) >= 0.05)
    throw InsufficientSpan("omega_max = " + std::to_string(omega_max) +
                           " leaves the open segment " + std::to_string(out.segment_turns) +
                           " turns from the closed-loop index");
  return out;
}

Eigen::MatrixXd dominant_operator_matrix(const UniformGrid& grid, const std::vector<double>& JP,
                                         const std::vector<double>& JS) {
  const int n = grid.size();
  if (static_cast<int>(JP.size()) != n || static_cast<int>(JS.size()) != n)
    throw ValidationError("grid", "sample count does not match grid size");
  Eigen::MatrixXd K(n, n);
  parallel_for(n, [&](std::size_t i) {
    const auto w = pv_weights(grid, grid[static_cast<int>(i)]);
    for (int j = 0; j < n; ++j) K(i, j) = -JP[i] / std::numbers::pi * w[j];
    K(i, i) += JS[i];
  });
  return K;
}

Eigen::MatrixXd dominant_operator_matrix(const StringState& state, const UniformGrid& grid,
                                         const QuadratureSettings& settings) {
  const auto nodes = grid.nodes();
  std::vector<double> jp(nodes.size()), js(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    jp[i] = std::norm(compute_I0(state, nodes[i], settings).value);
    js[i] = compute_JS(state, nodes[i], settings).value;
  });
  return dominant_operator_matrix(grid, jp, js);
}

OperatorAnalysis nullspace_analysis(const Eigen::MatrixXd& matrix, double threshold_ratio) {
  if (matrix.rows() != matrix.cols()) throw ValidationError("matrix", "must be square");
  if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0))
    throw ValidationError("nullspace.threshold_ratio", "must lie in (0,1)");
  OperatorAnalysis out;
  out.matrix_dim = static_cast<int>(matrix.rows());
  out.threshold_ratio = threshold_ratio;
  if (out.matrix_dim == 0) return out;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv(0);
  for (double s : out.singular_values)
    if (s < threshold_ratio * smax) ++out.nullspace_dim;

  const Eigen::VectorXd v = svd.matrixV().col(sv.size() - 1);
  out.null_vector.assign(v.data(), v.data() + v.size());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(matrix.cols());
  out.constant_solution_residual = smax > 0.0 ? (matrix * ones).norm() / (smax * ones.norm()) : 0.0;
  return out;
}

} // namespace psl
