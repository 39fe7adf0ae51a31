#include "psl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "psl/errors.hpp"

namespace psl {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

} // namespace

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ValidationError("numerics.rel_tol", "must lie in (0,1)");
  if (!(abs_tol > 0.0)) throw ValidationError("numerics.abs_tol", "must be > 0");
  if (!(truncation_eps > 0.0 && truncation_eps < 1.0))
    throw ValidationError("numerics.truncation_eps", "must lie in (0,1)");
  if (max_panels < 1) throw ValidationError("numerics.max_panels", "must be >= 1");
  if (!(oscillation_guard >= 1.0)) throw ValidationError("numerics.oscillation_guard", "must be >= 1");
}

namespace {

// Kronrod 15-point abscissae (positive half, outermost first) and weights, with
// the embedded 7-point Gauss weights for the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

template <class T, class F>
Panel<T> gk15(const F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<T, 7> f1{}, f2{};
  const T fc = f(centre);
  T resg = fc * kWg[3];
  T resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const T mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  const double ah = std::abs(half);
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * half, err};
}

template <class T, class F>
Integral<T> adaptive_impl(const F& f, double a, double b, const QuadratureSettings& s, int initial) {
  if (!(b > a)) return {};
  initial = std::max(1, initial);
  auto worse = [](const Panel<T>& x, const Panel<T>& y) {
    return x.error != y.error ? x.error < y.error : x.a > y.a;
  };
  std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(worse)> heap(worse);
  T total{};
  double total_err = 0.0;
  const double h = (b - a) / initial;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == initial ? b : a + (i + 1) * h;
    auto panel = gk15<T>(f, lo, hi);
    total += panel.value;
    total_err += panel.error;
    heap.push(panel);
  }
  int count = initial;
  const double min_width = 1e-13 * (b - a);
  while (total_err > std::max(s.abs_tol, s.rel_tol * std::abs(total))) {
    if (count >= s.max_panels)
      throw NonConvergence("adaptive quadrature exhausted max_panels=" + std::to_string(s.max_panels) +
                           " with error estimate " + sci(total_err) + " against target " +
                           sci(std::max(s.abs_tol, s.rel_tol * std::abs(total))) +
                           " (targets near eps * int|f| are below the rounding floor)");
    Panel<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.b - worst.a < min_width)
      throw NonConvergence("adaptive quadrature cannot resolve integrand near " + std::to_string(mid));
    auto left = gk15<T>(f, worst.a, mid);
    auto right = gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum in left-to-right order so the result does not depend on the split history.
  std::vector<Panel<T>> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  Integral<T> out;
  for (const auto& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  out.panels = count;
  return out;
}

} // namespace

Integral<double> integrate_adaptive(const RealFn& f, double a, double b, const QuadratureSettings& s,
                                    int initial_panels) {
  return adaptive_impl<double>(f, a, b, s, initial_panels);
}

Integral<cplx> integrate_adaptive(const ComplexFn& f, double a, double b, const QuadratureSettings& s,
                                  int initial_panels) {
  return adaptive_impl<cplx>(f, a, b, s, initial_panels);
}

int guarded_panel_count(double width, double freq_bound, const QuadratureSettings& s) {
  const double periods = width * std::abs(freq_bound) / (2.0 * std::numbers::pi);
  const double n = std::ceil(periods * s.oscillation_guard);
  return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(std::max(1, s.max_panels / 2))));
}

Integral<cplx> integrate_envelope(const ComplexFn& f, double p, double q, const QuadratureSettings& s,
                                  double freq_bound, double magnitude_bound) {
  if (!(p > 0.0)) throw ValidationError("p", "must be > 0");
  const double r = std::sqrt(-std::log(s.truncation_eps) / p);
  const double lo = -q - r;
  const double hi = -q + r;
  // Panels no wider than the envelope's own scale, and the oscillation guard.
  const int n0 = std::max({4, static_cast<int>(std::ceil(2.0 * r * std::sqrt(p))),
                           guarded_panel_count(hi - lo, freq_bound, s)});
  auto integrand = [&](double xi) {
    const double d = xi + q;
    return f(xi) * std::exp(-p * d * d);
  };
  auto out = adaptive_impl<cplx>(integrand, lo, hi, s, n0);
  out.error += magnitude_bound * std::sqrt(std::numbers::pi / p) * std::erfc(r * std::sqrt(p));
  return out;
}

Integral<double> pv_integral(const RealFn& f, double pole, double a, double b,
                             const QuadratureSettings& s) {
  if (!(a < pole && pole < b))
    throw PoleOutsideRange("pole " + std::to_string(pole) + " outside (" + std::to_string(a) + ", " +
                           std::to_string(b) + ")");
  const double fp = f(pole);
  const double hd = 1e-3 * std::max(1.0, std::abs(pole));
  const double dfp =
      (8.0 * (f(pole + hd) - f(pole - hd)) - (f(pole + 2 * hd) - f(pole - 2 * hd))) / (12.0 * hd);
  auto subtracted = [&](double k) {
    const double d = k - pole;
    return std::abs(d) < 1e-7 ? dfp : (f(k) - fp) / d;
  };
  auto left = adaptive_impl<double>(subtracted, a, pole, s, 1);
  auto right = adaptive_impl<double>(subtracted, pole, b, s, 1);
  Integral<double> out;
  out.value = left.value + right.value + fp * std::log((b - pole) / (pole - a));
  out.error = left.error + right.error;
  out.panels = left.panels + right.panels;
  return out;
}

UniformGrid::UniformGrid(double lo, double hi, int n) : lo_(lo), hi_(hi), n_(n) {
  if (n < 2) throw ValidationError("grid.n", "must be >= 2");
  if (!(hi > lo)) throw ValidationError("grid.max", "must exceed grid.min");
}

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = (*this)[i];
  return out;
}

namespace {

// Taylor coefficients at x of each Lagrange basis polynomial: row j holds c with
// l_j(x + t) = sum_m c[m] t^m. At most 7 nodes.
void lagrange_taylor(std::span<const double> nodes, double x, std::span<std::array<double, 7>> coeff) {
  const std::size_t m = nodes.size();
  for (std::size_t j = 0; j < m; ++j) {
    std::array<double, 7> c{};
    c[0] = 1.0;
    double denom = 1.0;
    std::size_t degree = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      denom *= nodes[j] - nodes[k];
      // Multiply by (t + (x - x_k)).
      const double shift = x - nodes[k];
      for (std::size_t d = degree + 2; d-- > 0;) c[d] = c[d] * shift + (d > 0 ? c[d - 1] : 0.0);
      ++degree;
    }
    for (auto& v : c) v /= denom;
    coeff[j] = c;
  }
}

} // namespace

std::vector<double> pv_weights(const UniformGrid& grid, double pole) {
  const int n = grid.size();
  const double h = grid.step();
  const double A = grid.lo() - 0.5 * h;
  const double B = grid.hi() + 0.5 * h;
  if (!(A < pole && pole < B)) throw PoleOutsideRange("pole " + std::to_string(pole) + " outside grid");

  std::vector<double> w(n, 0.0);
  double constant = std::log((B - pole) / (pole - A));
  // A node closer than this to the pole takes its subtracted value from the interpolant;
  // farther nodes use h / d directly, whose cancellation error is about eps * h / d.
  const double near = 1e-3 * h;
  int at_node = -1;
  for (int j = 0; j < n; ++j) {
    const double d = grid[j] - pole;
    if (std::abs(d) < near) {
      at_node = j;
      continue;
    }
    w[j] += h / d;
    constant -= h / d;
  }

  const int width = std::min(7, n);
  const int nearest = static_cast<int>(std::lround((pole - grid.lo()) / h));
  const int first = std::clamp(nearest - width / 2, 0, n - width);
  std::array<double, 7> nodes{};
  std::array<std::array<double, 7>, 7> coeff{};
  for (int k = 0; k < width; ++k) nodes[k] = grid[first + k];
  lagrange_taylor(std::span(nodes.data(), width), pole, std::span(coeff.data(), width));
  const double d = at_node >= 0 ? grid[at_node] - pole : 0.0;
  for (int k = 0; k < width; ++k) {
    w[first + k] += constant * coeff[k][0];
    if (at_node < 0) continue;
    // (P(p + d) - P(p)) / d for the interpolant P, expanded in d.
    double divided = 0.0;
    for (int m = width - 1; m >= 1; --m) divided = divided * d + coeff[k][m];
    w[first + k] += h * divided;
  }
  return w;
}

double TailDecay::mass_beyond(double x) const {
  const double gauss_half = 0.5 * std::sqrt(std::numbers::pi / rate);
  const double d = std::abs(x - center) - offset;
  if (d <= 0.0) return amplitude * (-d + gauss_half);
  return amplitude * gauss_half * std::erfc(std::sqrt(rate) * d);
}

HilbertResult hilbert_on_grid(const UniformGrid& grid, std::span<const double> samples, double pole,
                              const TailDecay& tail, const QuadratureSettings& s,
                              std::span<const double> sample_errors) {
  const int n = grid.size();
  if (static_cast<int>(samples.size()) != n)
    throw ValidationError("samples", "size does not match grid");
  if (!(grid.lo() <= pole && pole <= grid.hi()))
    throw PoleOutsideRange("pole " + std::to_string(pole) + " outside grid span");

  const double h = grid.step();
  double mass = 0.0;
  double peak = 0.0;
  for (double v : samples) {
    mass += h * std::abs(v);
    peak = std::max(peak, std::abs(v));
  }
  const double A = grid.lo() - 0.5 * h;
  const double B = grid.hi() + 0.5 * h;
  // Analytic envelope mass, and an exponential extrapolation of the decay seen in
  // the edge samples; the larger of the two is used on each side.
  const int window = std::max(4, static_cast<int>(std::ceil(1.0 / h)));
  auto window_peak = [&](int from, int count) {
    double m = 0.0;
    for (int j = from; j < from + count; ++j) m = std::max(m, std::abs(samples[j]));
    return m;
  };
  auto measured_mass = [&](bool right) -> double {
    if (2 * window > n) return std::numeric_limits<double>::infinity();
    const double outer = right ? window_peak(n - window, window) : window_peak(0, window);
    const double inner = right ? window_peak(n - 2 * window, window) : window_peak(window, window);
    if (outer == 0.0) return 0.0;
    // Far below the truncation level the samples are quadrature noise and show no
    // clean decay; one window width of that noise bounds what is left.
    if (outer <= 1e-6 * s.truncation_eps * peak) return outer * window * h;
    if (!(inner > outer)) return std::numeric_limits<double>::infinity();
    const double rate = std::log(inner / outer) / (window * h);
    return outer / rate;
  };
  const double left_mass =
      std::max(tail.center > A ? tail.mass_beyond(A) : 0.0, measured_mass(false));
  const double right_mass =
      std::max(tail.center < B ? tail.mass_beyond(B) : 0.0, measured_mass(true));
  if (left_mass + right_mass > s.truncation_eps * std::max(mass, 1e-300))
    throw InsufficientSpan("grid [" + std::to_string(grid.lo()) + ", " + std::to_string(grid.hi()) +
                           "] does not cover the support: tail mass " + sci(left_mass + right_mass) +
                           " vs sampled mass " + sci(mass));

  HilbertResult out;
  const auto w = pv_weights(grid, pole);
  double magnitude = 0.0;
  for (int j = 0; j < n; ++j) {
    out.value += w[j] * samples[j];
    magnitude += std::abs(w[j] * samples[j]);
  }
  // Worst-case summation bound; dominates only when the other terms are tiny.
  out.rounding = n * std::numeric_limits<double>::epsilon() * magnitude;
  if (!sample_errors.empty())
    for (int j = 0; j < n; ++j) out.sample_error += std::abs(w[j]) * sample_errors[j];

  const int m = (n + 1) / 2;
  if (m >= 3) {
    UniformGrid coarse(grid.lo(), grid[2 * (m - 1)], m);
    if (coarse.lo() - h < pole && pole < coarse.hi() + h) {
      const auto wc = pv_weights(coarse, pole);
      double coarse_value = 0.0;
      for (int j = 0; j < m; ++j) coarse_value += wc[j] * samples[2 * j];
      out.discretization = std::abs(out.value - coarse_value);
    }
  }
  out.tail_estimate = left_mass / std::max(pole - A, h) + right_mass / std::max(B - pole, h);
  out.error_budget = out.discretization + out.tail_estimate + out.sample_error + out.rounding;
  return out;
}

GaussLegendre gauss_legendre(int order) {
  GaussLegendre gl;
  gl.nodes.resize(order);
  gl.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    gl.nodes[i] = x;
    gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

namespace {

cplx ordered_pass(const ComplexFn& g1, const ComplexFn& g2, double p, double q, double lo, double hi,
                  int panels, const GaussLegendre& gl) {
  const int m = static_cast<int>(gl.nodes.size());
  const double h = (hi - lo) / panels;
  auto env = [&](double x) {
    const double d = x + q;
    return std::exp(-p * d * d);
  };
  cplx carried{};
  cplx total{};
  for (int k = 0; k < panels; ++k) {
    const double a = lo + k * h;
    const double b = k + 1 == panels ? hi : lo + (k + 1) * h;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    cplx panel_total{};
    for (int i = 0; i < m; ++i) {
      const double x = mid + half * gl.nodes[i];
      // Partial inner integral over [a, x].
      const double ih = 0.5 * (x - a);
      const double im = 0.5 * (x + a);
      cplx partial{};
      for (int j = 0; j < m; ++j) {
        const double z = im + ih * gl.nodes[j];
        partial += gl.weights[j] * g2(z) * env(z);
      }
      partial *= ih;
      panel_total += gl.weights[i] * g1(x) * env(x) * (carried + partial);
    }
    total += half * panel_total;
    cplx inner{};
    for (int j = 0; j < m; ++j) {
      const double z = mid + half * gl.nodes[j];
      inner += gl.weights[j] * g2(z) * env(z);
    }
    carried += half * inner;
  }
  return total;
}

} // namespace

Integral<cplx> ordered_double_integral(const ComplexFn& g1, const ComplexFn& g2, double p, double q,
                                       const QuadratureSettings& s, double freq_bound) {
  if (!(p > 0.0)) throw ValidationError("p", "must be > 0");
  static const GaussLegendre gl = gauss_legendre(12);
  const double r = std::sqrt(-std::log(s.truncation_eps) / p);
  const double lo = -q - r;
  const double hi = -q + r;
  int panels = std::max({8, static_cast<int>(std::ceil(2.0 * r * std::sqrt(p))),
                         guarded_panel_count(hi - lo, freq_bound, s)});
  cplx coarse = ordered_pass(g1, g2, p, q, lo, hi, panels, gl);
  for (;;) {
    if (2 * panels > s.max_panels)
      throw NonConvergence("ordered double integral exhausted max_panels=" +
                           std::to_string(s.max_panels));
    panels *= 2;
    const cplx fine = ordered_pass(g1, g2, p, q, lo, hi, panels, gl);
    const double diff = std::abs(fine - coarse);
    if (diff <= std::max(s.abs_tol, s.rel_tol * std::abs(fine))) {
      // Truncation: the neglected region has at least one variable outside the window.
      const double trunc = 2.0 * std::numbers::pi / p * std::erfc(r * std::sqrt(p));
      return {fine, diff + trunc, panels};
    }
    coarse = fine;
  }
}

} // namespace psl
