#include "psl/invariants.hpp"

#include <cmath>
#include <numbers>

#include "psl/errors.hpp"
#include "psl/parallel.hpp"

namespace psl {

void PhysicalConstants::validate() const {
  if (!(std::isfinite(gamma) && gamma > 0.0)) throw ValidationError("constants.gamma", "must be > 0");
  if (!(std::isfinite(m0) && m0 > 0.0)) throw ValidationError("constants.m0", "must be > 0");
  if (!(std::isfinite(E0) && E0 > 0.0)) throw ValidationError("constants.E0", "must be > 0");
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(angle, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

StringState StringState::normalized() const {
  constants.validate();
  auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string("state.") + name, "must be finite");
  };
  finite(omega, "omega");
  finite(beta, "beta");
  finite(q, "q");
  finite(kappa, "kappa");
  if (!std::isfinite(Z.real()) || !std::isfinite(Z.imag())) throw ValidationError("state.Z", "must be finite");
  if (!(std::isfinite(p) && p > 0.0)) throw ValidationError("state.p", "must be > 0");
  StringState out = *this;
  out.beta = wrap_angle(beta);
  return out;
}

double StringState::phase(double omega_value, double xi, bool with_beta) const {
  return 2.0 * eval_I(profile, xi) + omega_value * xi + (with_beta ? 2.0 * beta : 0.0);
}

double StringState::frequency_bound(double omega_value) const {
  return 2.0 * profile.max_abs_rho() + std::abs(omega_value);
}

Integral<cplx> compute_I0(const StringState& state, double omega, const QuadratureSettings& settings) {
  auto f = [&](double xi) { return std::polar(1.0, state.phase(omega, xi)); };
  auto r = integrate_envelope(f, state.p, state.q, settings, state.frequency_bound(omega));
  r.value *= 0.5;
  r.error *= 0.5;
  return r;
}

namespace {

Integral<cplx> ordered_phase_integral(const StringState& state, double omega, const QuadratureSettings& s,
                                      double sign) {
  // beta cancels between the two factors, so it is left out entirely.
  auto g1 = [&](double xi) { return std::polar(1.0, sign * state.phase(omega, xi, false)); };
  auto g2 = [&](double z) { return std::polar(1.0, -sign * state.phase(omega, z, false)); };
  return ordered_double_integral(g1, g2, state.p, state.q, s, state.frequency_bound(omega));
}

} // namespace

Integral<double> compute_JS(const StringState& state, double omega, const QuadratureSettings& settings,
                            bool reversed) {
  const auto ordered = ordered_phase_integral(state, omega, settings, reversed ? -1.0 : 1.0);
  return {-0.5 * ordered.value.imag(), 0.5 * ordered.error, ordered.panels};
}

cplx compute_g(const StringState& state, double omega, const QuadratureSettings& settings) {
  StringState phase_free = state;
  phase_free.beta = 0.0;
  const double jp = std::norm(compute_I0(phase_free, omega, settings).value);
  const double js = compute_JS(state, omega, settings).value;
  return {jp, -js};
}

Integral<double> jp_double_integral(const StringState& state, double omega, const QuadratureSettings& s) {
  const auto forward = ordered_phase_integral(state, omega, s, 1.0);
  const auto backward = ordered_phase_integral(state, omega, s, -1.0);
  return {0.25 * (forward.value.real() + backward.value.real()), 0.25 * (forward.error + backward.error),
          forward.panels};
}

InvariantSet invariant_set(const StringState& state, double omega, const QuadratureSettings& settings) {
  InvariantSet out;
  out.omega = omega;
  const auto i0 = compute_I0(state, omega, settings);
  const auto js = compute_JS(state, omega, settings);
  out.I0 = i0.value;
  out.I0_error = i0.error;
  out.JP = std::norm(i0.value);
  out.JP_error = 2.0 * std::abs(i0.value) * i0.error + i0.error * i0.error;
  out.JS = js.value;
  out.JS_error = js.error;

  const double g = state.constants.gamma;
  const double k = state.kappa;
  out.momentum = g * k * out.I0;
  out.P2 = g * g * k * k * out.JP;
  out.S = 0.5 * g * k * k * out.JS;
  return out;
}

std::vector<InvariantSet> invariant_sweep(const StringState& state, const std::vector<double>& omega_grid,
                                          const QuadratureSettings& settings) {
  for (std::size_t i = 1; i < omega_grid.size(); ++i)
    if (!(omega_grid[i] > omega_grid[i - 1])) throw ValidationError("omega_grid", "must be strictly increasing");
  std::vector<InvariantSet> out(omega_grid.size());
  parallel_for(omega_grid.size(), [&](std::size_t i) { out[i] = invariant_set(state, omega_grid[i], settings); });
  return out;
}

} // namespace psl
