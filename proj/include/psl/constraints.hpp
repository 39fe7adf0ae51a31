#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "psl/invariants.hpp"

namespace psl {

/// P2 JS - 2 gamma S JP with P2 from |I0|^2, S from the ordered integral and the
/// JP factor from the double-integral path. Analytically zero; `scale` is
/// |P2 JS| + |2 gamma S JP| for relative comparisons.
struct Phi1Result {
  double residual = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

Phi1Result phi1_residual(const StringState& state, double omega, const QuadratureSettings& settings = {});

struct ConstraintReport {
  double omega = 0.0;
  double phi1_residual = 0.0;
  double phi2_residual = 0.0;     // S - (1/(2 pi gamma)) PV int P2(k)/(k - omega) dk
  double phi2_error_budget = 0.0; // same units as phi2_residual
  // Scale-free form JS - (1/pi) PV int JP(k)/(k - omega) dk and its budget.
  double dispersion_residual = 0.0;
  double dispersion_budget = 0.0;
};

/// Samples of JP on a Hilbert grid with their error estimates.
struct DispersionSamples {
  UniformGrid grid;
  std::vector<double> JP;
  std::vector<double> JP_error;
  TailDecay tail; // envelope bound for JP
};

/// Gaussian envelope descriptor of JP(omega): amplitude pi/(4p), rate 1/(2p), flat
/// out to 2 max|rho|. Exact for rho == 0. For other profiles JP decays roughly
/// exponentially and can exceed this; hilbert_on_grid then relies on the decay it
/// measures from the edge samples.
TailDecay jp_tail(const StringState& state);

/// Symmetric odd-sized grid with the given step. The span starts at the jp_tail
/// estimate and grows until JP on the outermost unit on both sides is below
/// 1e-2 * truncation_eps of its peak. Throws InsufficientSpan beyond |omega| = 500.
UniformGrid dispersion_grid(const StringState& state, const QuadratureSettings& settings, double step = 0.025);

DispersionSamples sample_dispersion(const StringState& state, const UniformGrid& grid,
                                    const QuadratureSettings& settings = {});

ConstraintReport phi2_residual(const StringState& state, double omega, const DispersionSamples& samples,
                               const QuadratureSettings& settings = {});
ConstraintReport phi2_residual(const StringState& state, double omega, const UniformGrid& grid,
                               const QuadratureSettings& settings = {});

struct WindingResult {
  int index = 0;
  double segment_turns = 0.0; // winding along [-omega_max, omega_max] alone, in turns
  double closure_turns = 0.0; // contribution of the arc through omega = infinity
  int samples = 0;            // after adaptive densification
  double min_re_g = 0.0;      // smallest sampled Re g, expected >= 0
};

/// Winding number of G = -g/conj(g) (or -conj(g)/g when `conjugate`) along the
/// real omega axis closed through infinity, where G -> 1.
///
/// Adjacent samples are bisected until their phase step is below pi/2. Throws
/// PhaseUnwrapFailure when that fails or g vanishes, and InsufficientSpan when
/// the open segment misses the integer by 0.05 turns or more (omega_max too small).
WindingResult winding_index(const StringState& state, double omega_max, int n_samples,
                            const QuadratureSettings& settings = {}, bool conjugate = false);

/// Discretization of K[f](w) = JS(w) f(w) - (JP(w)/pi) PV int f(k)/(k - w) dk on
/// the grid nodes, with the pv_weights rows used for the Hilbert part.
Eigen::MatrixXd dominant_operator_matrix(const UniformGrid& grid, const std::vector<double>& JP,
                                         const std::vector<double>& JS);
Eigen::MatrixXd dominant_operator_matrix(const StringState& state, const UniformGrid& grid,
                                         const QuadratureSettings& settings = {});

struct OperatorAnalysis {
  std::vector<double> grid;
  int matrix_dim = 0;
  std::vector<double> singular_values; // descending
  double threshold_ratio = 0.0;
  int nullspace_dim = 0;
  std::optional<int> winding_index;
  double constant_solution_residual = 0.0; // |K 1| / (sigma_max |1|)
  std::vector<double> null_vector;         // right singular vector of the smallest singular value
};

/// SVD of a square matrix; nullspace_dim counts singular values below
/// threshold_ratio * sigma_max.
OperatorAnalysis nullspace_analysis(const Eigen::MatrixXd& matrix, double threshold_ratio = 1e-6);

} // namespace psl
