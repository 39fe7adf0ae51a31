#pragma once

#include <vector>

#include "psl/invariants.hpp"

namespace psl {

/// Sampled string shape X = X3 + i X1 over a (xi0, xi1) grid, xi1 >= 0.
///
/// Storage is row-major: node (i, j) is at index i * xi1_grid.size() + j, where
/// i runs over xi0. With xi_plus = xi1 + xi0 and xi_minus = xi1 - xi0,
/// d_plus + d_minus is the spatial tangent d X / d xi1.
struct WorldsheetPatch {
  std::vector<double> xi0_grid;
  std::vector<double> xi1_grid;
  std::vector<cplx> positions;
  std::vector<double> position_errors;
  std::vector<cplx> d_plus;
  std::vector<cplx> d_minus;
  double nu = 1.0;

  std::size_t index(std::size_t i, std::size_t j) const { return i * xi1_grid.size() + j; }
};

/// Psi(eta) = exp(-p (eta + q)^2 + i theta(eta)), the integrand of X.
cplx worldsheet_integrand(const StringState& state, double eta);

/// One row xi0 = const of positions with error estimates.
///
/// X = Z - kappa [ int_{-inf}^{xi0 - xi1} Psi - int_{xi0 + xi1}^{inf} Psi ].
/// Throws ValidationError unless xi1_grid is nonnegative and increasing.
std::vector<Integral<cplx>> reconstruct_row(const StringState& state, double xi0,
                                            const std::vector<double>& xi1_grid,
                                            const QuadratureSettings& settings = {});

struct Tangents {
  std::vector<cplx> d_plus;
  std::vector<cplx> d_minus;
};

/// d_plus = -kappa Psi(xi0 + xi1), d_minus = +kappa Psi(xi0 - xi1) (nu = 1).
Tangents tangents(const StringState& state, double xi0, const std::vector<double>& xi1_grid);

/// Positions and tangents on the full grid; rows are evaluated in parallel.
WorldsheetPatch reconstruct(const StringState& state, const std::vector<double>& xi0_grid,
                            const std::vector<double>& xi1_grid, const QuadratureSettings& settings = {});

struct CuspPoint {
  double xi0 = 0.0;
  double xi1 = 0.0;
  cplx position{};
  double residual = 0.0;          // |d X / d xi1| at the point
  double relative_residual = 0.0; // residual / (kappa (|Psi(xi0 - xi1)| + |Psi(xi0 + xi1)|))
};

struct CuspSearch {
  double xi0_min = -1.0;
  double xi0_max = 1.0;
  double xi1_min = 0.0;
  double xi1_max = 5.0;
  int xi0_points = 41;
  int xi1_points = 101;
  double tol = 1e-10; // on the relative residual
  void validate() const;
};

struct CuspResult {
  std::vector<CuspPoint> cusps; // sorted by (xi1, xi0)
  bool degenerate = false;      // kappa == 0: the tangent vanishes identically
  int xi0_points = 0;           // resolution actually used
  int xi1_points = 0;
};

/// Interior zeros of d X / d xi1.
///
/// Cells where both real components of the normalized tangent change sign (or
/// touch zero) seed a 2D Newton iteration with a pseudo-inverse step, so lines
/// of zeros are handled too. The grid is refined automatically to at least four
/// nodes per period of the fastest phase. Points with xi1 within half a cell of
/// zero are the boundary, not cusps, and are dropped.
CuspResult find_cusps(const StringState& state, const CuspSearch& search,
                      const QuadratureSettings& settings = {});

} // namespace psl
