#include "psl/worldsheet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "psl/errors.hpp"
#include "psl/parallel.hpp"

namespace psl {

namespace {

void check_xi1_grid(const std::vector<double>& grid) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!std::isfinite(grid[j]) || grid[j] < 0.0)
      throw ValidationError("worldsheet.xi1_grid", "values must be finite and >= 0");
    if (j > 0 && !(grid[j] > grid[j - 1]))
      throw ValidationError("worldsheet.xi1_grid", "must be strictly increasing");
  }
}

// Psi' = Psi * (-2 p (eta + q) + i (2 rho + omega)).
cplx integrand_derivative(const StringState& state, double eta, cplx psi) {
  const double re = -2.0 * state.p * (eta + state.q);
  const double im = 2.0 * eval_rho(state.profile, eta) + state.omega;
  return psi * cplx(re, im);
}

} // namespace

cplx worldsheet_integrand(const StringState& state, double eta) {
  const double d = eta + state.q;
  return std::polar(std::exp(-state.p * d * d), state.phase(state.omega, eta));
}

std::vector<Integral<cplx>> reconstruct_row(const StringState& state, double xi0,
                                            const std::vector<double>& xi1_grid,
                                            const QuadratureSettings& settings) {
  check_xi1_grid(xi1_grid);
  std::vector<Integral<cplx>> row(xi1_grid.size());
  if (state.kappa == 0.0) {
    for (auto& node : row) node.value = state.Z;
    return row;
  }
  const double r = envelope_half_width(state.p, settings.truncation_eps);
  const double lo = -state.q - r;
  const double hi = -state.q + r;
  const double freq = state.frequency_bound(state.omega);
  const double truncation = std::sqrt(std::numbers::pi / state.p) * std::erfc(r * std::sqrt(state.p));
  const ComplexFn psi = [&](double eta) { return worldsheet_integrand(state, eta); };

  // Bracket is +2 below xi0 - xi1, 0 in between and -2 above xi0 + xi1.
  auto piece = [&](double a, double b) -> Integral<cplx> {
    if (!(b > a)) return {};
    return integrate_adaptive(psi, a, b, settings, guarded_panel_count(b - a, freq, settings));
  };
  for (std::size_t j = 0; j < xi1_grid.size(); ++j) {
    const double left_end = std::min(xi0 - xi1_grid[j], hi);
    const double right_start = std::max(xi0 + xi1_grid[j], lo);
    const auto left = piece(lo, left_end);
    const auto right = piece(right_start, hi);
    row[j].value = state.Z - state.kappa * (left.value - right.value);
    row[j].error = std::abs(state.kappa) * (left.error + right.error + truncation);
    row[j].panels = left.panels + right.panels;
  }
  return row;
}

Tangents tangents(const StringState& state, double xi0, const std::vector<double>& xi1_grid) {
  check_xi1_grid(xi1_grid);
  Tangents out;
  out.d_plus.reserve(xi1_grid.size());
  out.d_minus.reserve(xi1_grid.size());
  for (double xi1 : xi1_grid) {
    out.d_plus.push_back(-state.kappa * worldsheet_integrand(state, xi0 + xi1));
    out.d_minus.push_back(state.kappa * worldsheet_integrand(state, xi0 - xi1));
  }
  return out;
}

WorldsheetPatch reconstruct(const StringState& state, const std::vector<double>& xi0_grid,
                            const std::vector<double>& xi1_grid, const QuadratureSettings& settings) {
  check_xi1_grid(xi1_grid);
  for (double x : xi0_grid)
    if (!std::isfinite(x)) throw ValidationError("worldsheet.xi0_grid", "values must be finite");
  WorldsheetPatch patch;
  patch.xi0_grid = xi0_grid;
  patch.xi1_grid = xi1_grid;
  const std::size_t n1 = xi1_grid.size();
  const std::size_t total = xi0_grid.size() * n1;
  patch.positions.resize(total);
  patch.position_errors.resize(total);
  patch.d_plus.resize(total);
  patch.d_minus.resize(total);
  parallel_for(xi0_grid.size(), [&](std::size_t i) {
    const auto row = reconstruct_row(state, xi0_grid[i], xi1_grid, settings);
    const auto t = tangents(state, xi0_grid[i], xi1_grid);
    for (std::size_t j = 0; j < n1; ++j) {
      patch.positions[i * n1 + j] = row[j].value;
      patch.position_errors[i * n1 + j] = row[j].error;
      patch.d_plus[i * n1 + j] = t.d_plus[j];
      patch.d_minus[i * n1 + j] = t.d_minus[j];
    }
  });
  return patch;
}

void CuspSearch::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(xi0_min) || !finite(xi0_max) || !(xi0_max > xi0_min))
    throw ValidationError("cusps.xi0_max", "xi0 range must be finite with max > min");
  if (!finite(xi1_min) || !finite(xi1_max) || xi1_min < 0.0 || !(xi1_max > xi1_min))
    throw ValidationError("cusps.xi1_max", "xi1 range must be finite, >= 0, with max > min");
  if (xi0_points < 2) throw ValidationError("cusps.xi0_points", "must be >= 2");
  if (xi1_points < 2) throw ValidationError("cusps.xi1_points", "must be >= 2");
  if (!(tol > 0.0)) throw ValidationError("cusps.tol", "must be > 0");
}

namespace {

struct TangentEval {
  cplx value;    // Psi(xi0 - xi1) - Psi(xi0 + xi1), so d X / d xi1 = kappa * value
  double scale;  // |Psi(xi0 - xi1)| + |Psi(xi0 + xi1)|
};

TangentEval tangent_eval(const StringState& state, double xi0, double xi1) {
  const cplx pa = worldsheet_integrand(state, xi0 - xi1);
  const cplx pb = worldsheet_integrand(state, xi0 + xi1);
  return {pa - pb, std::abs(pa) + std::abs(pb)};
}

double relative(const TangentEval& t) { return t.scale > 0.0 ? std::abs(t.value) / t.scale : 0.0; }

int resolved_points(double lo, double hi, int requested, double freq) {
  if (freq <= 0.0) return requested;
  const double max_step = std::numbers::pi / (2.0 * freq); // four nodes per period
  const int needed = static_cast<int>(std::ceil((hi - lo) / max_step)) + 1;
  return std::max(requested, needed);
}

} // namespace

CuspResult find_cusps(const StringState& state, const CuspSearch& search, const QuadratureSettings& settings) {
  search.validate();
  CuspResult out;
  if (state.kappa == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double freq = std::max(std::abs(state.omega), 2.0 * state.profile.max_abs_rho());
  out.xi0_points = resolved_points(search.xi0_min, search.xi0_max, search.xi0_points, freq);
  out.xi1_points = resolved_points(search.xi1_min, search.xi1_max, search.xi1_points, freq);
  const UniformGrid g0(search.xi0_min, search.xi0_max, out.xi0_points);
  const UniformGrid g1(search.xi1_min, search.xi1_max, out.xi1_points);
  const int n0 = g0.size();
  const int n1 = g1.size();

  // Normalized tangent on the nodes.
  std::vector<cplx> field(static_cast<std::size_t>(n0) * n1);
  parallel_for(static_cast<std::size_t>(n0), [&](std::size_t i) {
    for (int j = 0; j < n1; ++j) {
      const auto t = tangent_eval(state, g0[static_cast<int>(i)], g1[j]);
      field[i * n1 + j] = t.scale > 0.0 ? t.value / t.scale : cplx{};
    }
  });

  struct Cell {
    int i, j;
  };
  std::vector<Cell> cells;
  for (int i = 0; i + 1 < n0; ++i) {
    for (int j = 0; j + 1 < n1; ++j) {
      double rmin = INFINITY, rmax = -INFINITY, imin = INFINITY, imax = -INFINITY;
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
          const cplx v = field[static_cast<std::size_t>(i + di) * n1 + (j + dj)];
          rmin = std::min(rmin, v.real());
          rmax = std::max(rmax, v.real());
          imin = std::min(imin, v.imag());
          imax = std::max(imax, v.imag());
        }
      if (rmin <= 0.0 && rmax >= 0.0 && imin <= 0.0 && imax >= 0.0) cells.push_back({i, j});
    }
  }

  const double h0 = g0.step();
  const double h1 = g1.step();
  std::vector<std::optional<CuspPoint>> refined(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    double x0 = g0[cells[c].i] + 0.5 * h0;
    double x1 = g1[cells[c].j] + 0.5 * h1;
    TangentEval t = tangent_eval(state, x0, x1);
    for (int iter = 0; iter < 60 && relative(t) > 1e-3 * search.tol; ++iter) {
      const cplx pa = worldsheet_integrand(state, x0 - x1);
      const cplx pb = worldsheet_integrand(state, x0 + x1);
      const cplx da = integrand_derivative(state, x0 - x1, pa);
      const cplx db = integrand_derivative(state, x0 + x1, pb);
      const cplx d_xi0 = da - db;
      const cplx d_xi1 = -da - db;
      Eigen::Matrix2d jac;
      jac << d_xi0.real(), d_xi1.real(), d_xi0.imag(), d_xi1.imag();
      const Eigen::Vector2d rhs(-t.value.real(), -t.value.imag());
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
      svd.setThreshold(1e-10);
      const Eigen::Vector2d step = svd.solve(rhs);
      if (!step.allFinite()) break;
      x0 += step(0);
      x1 += step(1);
      t = tangent_eval(state, x0, x1);
      if (step.norm() < 1e-15 * (1.0 + std::abs(x0) + std::abs(x1))) break;
    }
    if (!(relative(t) < search.tol)) return;
    // Accept only points near the seeding cell and inside the search box.
    if (x0 < g0[cells[c].i] - h0 || x0 > g0[cells[c].i] + 2.0 * h0) return;
    if (x1 < g1[cells[c].j] - h1 || x1 > g1[cells[c].j] + 2.0 * h1) return;
    if (x0 < search.xi0_min || x0 > search.xi0_max || x1 > search.xi1_max) return;
    if (x1 < std::max(search.xi1_min, 0.5 * h1)) return; // boundary, identically satisfied
    CuspPoint pt;
    pt.xi0 = x0;
    pt.xi1 = x1;
    pt.residual = std::abs(state.kappa) * std::abs(t.value);
    pt.relative_residual = relative(t);
    refined[c] = pt;
  });

  std::vector<CuspPoint> found;
  for (auto& r : refined)
    if (r) found.push_back(*r);
  std::sort(found.begin(), found.end(), [](const CuspPoint& a, const CuspPoint& b) {
    return a.xi1 != b.xi1 ? a.xi1 < b.xi1 : a.xi0 < b.xi0;
  });
  const double merge = 0.5 * std::min(h0, h1);
  for (const auto& pt : found) {
    const bool duplicate = std::any_of(out.cusps.begin(), out.cusps.end(), [&](const CuspPoint& q) {
      return std::hypot(q.xi0 - pt.xi0, q.xi1 - pt.xi1) < merge;
    });
    if (!duplicate) out.cusps.push_back(pt);
  }
  parallel_for(out.cusps.size(), [&](std::size_t k) {
    out.cusps[k].position = reconstruct_row(state, out.cusps[k].xi0, {out.cusps[k].xi1}, settings)[0].value;
  });
  return out;
}

} // namespace psl
