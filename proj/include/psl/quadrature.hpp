#pragma once

#include <complex>
#include <functional>
#include <span>
#include <type_traits>
#include <vector>

namespace psl {

using cplx = std::complex<double>;
using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cplx(double)>;

struct QuadratureSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double truncation_eps = 1e-16;
  int max_panels = 20000;
  double oscillation_guard = 8.0; // panels per period of the fastest phase

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// An integral value and an estimate of its absolute error.
template <class T>
struct Integral {
  T value{};
  double error = 0.0;
  int panels = 0;
};

/// Globally adaptive Gauss-Kronrod (G7/K15) on [a, b], bisecting the panel with
/// the largest error estimate until the total error meets the tolerances.
/// Starts from `initial_panels` equal panels. Throws NonConvergence when
/// settings.max_panels is exhausted.
Integral<double> integrate_adaptive(const RealFn& f, double a, double b,
                                    const QuadratureSettings& settings, int initial_panels = 1);
Integral<cplx> integrate_adaptive(const ComplexFn& f, double a, double b,
                                  const QuadratureSettings& settings, int initial_panels = 1);

/// Dispatches callables by return type, so a lambda returning double does not
/// also match the complex overload.
template <class F>
  requires(!std::is_same_v<std::decay_t<F>, RealFn> && !std::is_same_v<std::decay_t<F>, ComplexFn>)
auto integrate_adaptive(F&& f, double a, double b, const QuadratureSettings& settings, int initial_panels = 1) {
  if constexpr (std::is_same_v<std::decay_t<std::invoke_result_t<F&, double>>, cplx>)
    return integrate_adaptive(ComplexFn(std::forward<F>(f)), a, b, settings, initial_panels);
  else
    return integrate_adaptive(RealFn(std::forward<F>(f)), a, b, settings, initial_panels);
}

/// Number of initial panels on a window so that each covers at most
/// 1/oscillation_guard of a period at angular frequency `freq_bound`.
int guarded_panel_count(double width, double freq_bound, const QuadratureSettings& settings);

/// int f(xi) exp(-p (xi+q)^2) dxi over the real line.
///
/// The window is [-q - r, -q + r] with exp(-p r^2) = truncation_eps. The error
/// estimate adds the analytic truncation bound magnitude_bound * sqrt(pi/p) * erfc(r sqrt(p)).
/// `freq_bound` bounds the angular frequency of f and sets the initial panel width.
Integral<cplx> integrate_envelope(const ComplexFn& f, double p, double q,
                                  const QuadratureSettings& settings, double freq_bound = 0.0,
                                  double magnitude_bound = 1.0);

/// PV int_a^b f(k) / (k - pole) dk by singularity subtraction:
/// int_a^b (f(k) - f(pole)) / (k - pole) dk + f(pole) ln((b - pole) / (pole - a)).
/// Throws PoleOutsideRange unless a < pole < b.
Integral<double> pv_integral(const RealFn& f, double pole, double a, double b,
                             const QuadratureSettings& settings);

/// Uniform grid lo, lo + h, ..., hi with n >= 2 nodes.
class UniformGrid {
public:
  UniformGrid(double lo, double hi, int n);
  static UniformGrid symmetric(double half_span, int n) { return {-half_span, half_span, n}; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  int size() const noexcept { return n_; }
  double step() const noexcept { return (hi_ - lo_) / (n_ - 1); }
  double operator[](int i) const noexcept { return i == n_ - 1 ? hi_ : lo_ + i * step(); }
  std::vector<double> nodes() const;

private:
  double lo_;
  double hi_;
  int n_;
};

/// Weights w with PV int f(k)/(k - pole) dk ~ sum_j w_j f(k_j) for f sampled on
/// `grid` and negligible outside it.
///
/// Nodes are treated as midpoint cells, so the integration interval is
/// [lo - h/2, hi + h/2]. The subtracted integrand (f(k) - f(pole))/(k - pole) is
/// summed with the midpoint rule; f(pole) comes from a 7-point Lagrange stencil,
/// which also supplies the subtracted value at a node within 1e-3 h of the pole.
/// The constant part contributes f(pole) times the exact log.
std::vector<double> pv_weights(const UniformGrid& grid, double pole);

/// Envelope bound |f(k)| <= amplitude * exp(-rate * max(0, |k - center| - offset)^2).
struct TailDecay {
  double amplitude = 1.0;
  double center = 0.0;
  double rate = 0.5;
  double offset = 0.0;

  /// int of the bound over k > x (for x right of the plateau) or k < x (left).
  double mass_beyond(double x) const;
};

struct HilbertResult {
  double value = 0.0;
  double error_budget = 0.0;    // sum of the four terms below
  double tail_estimate = 0.0;   // bound on the part of the integral outside the grid
  double discretization = 0.0;  // |fine - coarse| on the every-other-node grid
  double sample_error = 0.0;    // propagated sample errors
  double rounding = 0.0;        // floating-point summation bound
};

/// PV int_{-inf}^{inf} f(k)/(k - pole) dk from grid samples.
///
/// The mass outside the grid on each side is the larger of the `tail` envelope
/// bound and an exponential extrapolation of the decay measured between the two
/// outermost unit-width windows of samples. Throws InsufficientSpan when that mass
/// exceeds truncation_eps relative to the sampled mass (including when no decay
/// is visible at the edge), and PoleOutsideRange when the pole is off the grid.
HilbertResult hilbert_on_grid(const UniformGrid& grid, std::span<const double> samples, double pole,
                              const TailDecay& tail, const QuadratureSettings& settings,
                              std::span<const double> sample_errors = {});

/// int int_{xi > zeta} g1(xi) g2(zeta) exp(-p((xi+q)^2 + (zeta+q)^2)) dxi dzeta.
///
/// Evaluated as one outer pass int g1(xi) e(xi) C(xi) dxi where the cumulative
/// inner integral C(xi) = int_{-inf}^{xi} g2 e is carried across a panel grid.
/// Panel count doubles until two levels agree to tolerance.
Integral<cplx> ordered_double_integral(const ComplexFn& g1, const ComplexFn& g2, double p, double q,
                                       const QuadratureSettings& settings, double freq_bound = 0.0);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int order);

} // namespace psl
