#pragma once

#include <complex>
#include <vector>

#include "psl/profiles.hpp"
#include "psl/quadrature.hpp"

namespace psl {

/// String tension gamma, Galilei mass m0 and energy scale E0; all strictly positive.
struct PhysicalConstants {
  double gamma = 1.0;
  double m0 = 1.0;
  double E0 = 1.0;

  void validate() const;
};

/// Full dynamical configuration of the planar string.
///
/// `Z` holds Z3 + i Z1. `beta` is kept in [0, 2pi); call normalized() after
/// editing fields by hand.
struct StringState {
  Profile profile;
  double omega = 0.0;
  double beta = 0.0;
  double p = 1.0;
  double q = 0.0;
  double kappa = 1.0;
  cplx Z{};
  PhysicalConstants constants;

  /// Validates every field (ValidationError names it) and wraps beta into [0, 2pi).
  StringState normalized() const;

  /// Phase theta(xi) = 2 I(xi) + omega xi + 2 beta at the given omega.
  double phase(double omega_value, double xi, bool with_beta = true) const;

  /// Bound on |d theta / d xi| = |2 rho + omega|.
  double frequency_bound(double omega_value) const;
};

/// Angle wrapped into [0, 2pi).
double wrap_angle(double angle);

/// Invariants of the string at one omega.
struct InvariantSet {
  double omega = 0.0;
  cplx I0{};
  double JP = 0.0;
  double JS = 0.0;
  cplx momentum{}; // P3 + i P1
  double P2 = 0.0;
  double S = 0.0;
  // Absolute error estimates of the scale-free integrals.
  double I0_error = 0.0;
  double JP_error = 0.0;
  double JS_error = 0.0;
};

/// I0(omega) = (1/2) int exp(-p (xi+q)^2 + i theta(xi)) dxi.
Integral<cplx> compute_I0(const StringState& state, double omega, const QuadratureSettings& settings = {});

/// JS(omega) from the ordered double integral,
/// JS = -(1/2) Im int_{xi > zeta} e(xi) e(zeta) exp(i (theta(xi) - theta(zeta))).
/// `reversed` swaps the integration order, which flips the sign.
Integral<double> compute_JS(const StringState& state, double omega, const QuadratureSettings& settings = {},
                            bool reversed = false);

/// g(omega) = JP - i JS with JP = |I0|^2. Independent of beta, kappa and Z.
cplx compute_g(const StringState& state, double omega, const QuadratureSettings& settings = {});

/// JP through the double-integral definition (cosine part of both ordered halves).
/// Slow path kept as a cross-check of JP = |I0|^2.
Integral<double> jp_double_integral(const StringState& state, double omega,
                                    const QuadratureSettings& settings = {});

/// momentum = gamma kappa I0, P2 = gamma^2 kappa^2 JP, S = (gamma kappa^2 / 2) JS.
InvariantSet invariant_set(const StringState& state, double omega, const QuadratureSettings& settings = {});

/// invariant_set over a strictly increasing grid, evaluated in parallel.
std::vector<InvariantSet> invariant_sweep(const StringState& state, const std::vector<double>& omega_grid,
                                          const QuadratureSettings& settings = {});

} // namespace psl
