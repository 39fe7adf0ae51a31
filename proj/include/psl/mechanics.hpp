#pragma once

#include <optional>
#include <vector>

#include "psl/constraints.hpp"
#include "psl/invariants.hpp"

namespace psl {

/// E0 (2 int rho^2 + p): energy of the internal degrees of freedom without the spin term.
double internal_energy(const StringState& state);

/// h_int = E0 (2 int rho^2 + p) + gamma omega S(omega) / (2 m0).
double h_int(const StringState& state, double omega, const QuadratureSettings& settings = {});

struct HamiltonianValue {
  double H = 0.0;       // P2/(2 m0) + h_int; both Lagrange multipliers are zero
  double kinetic = 0.0; // P2/(2 m0)
  double h_int = 0.0;
  double phi1_residual = 0.0;
  std::optional<double> phi2_residual; // only when a dispersion grid is supplied
};

HamiltonianValue hamiltonian(const StringState& state, double omega, const QuadratureSettings& settings = {},
                             const DispersionSamples* dispersion = nullptr);

/// 1/m_eff = (1/m0) [1 + (omega/2) JS/JP]. `inverse` is always finite; the mass
/// is flagged divergent when |1 + (omega/2) JS/JP| < divergence_eps. The sign is
/// kept: m_eff is negative past the first divergence.
struct EffectiveMass {
  double inverse = 0.0;
  bool divergent = false;
  std::optional<double> value() const {
    if (divergent) return std::nullopt;
    return 1.0 / inverse;
  }
};

EffectiveMass effective_mass(const StringState& state, double omega, const QuadratureSettings& settings = {},
                             double divergence_eps = 1e-12);
EffectiveMass effective_mass(const PhysicalConstants& constants, const InvariantSet& inv,
                             double divergence_eps = 1e-12);

/// frakF = JP + (omega/2) JS; its zeros are where m_eff diverges.
double frak_F(const StringState& state, double omega, const QuadratureSettings& settings = {});

struct Divergence {
  double omega = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0; // |frakF| at omega
};

struct DivergenceSettings {
  int scan_points = 401;
  double tol = 1e-10; // |frakF| < tol * JP(0) at an accepted root
};

/// Zeros of frakF in [lo, hi]: sign changes on a uniform scan, refined by TOMS 748.
std::vector<Divergence> find_divergences(const StringState& state, double lo, double hi,
                                         const QuadratureSettings& settings = {},
                                         const DivergenceSettings& div = {});

struct MassCurve {
  std::vector<double> grid;
  std::vector<double> JP;
  std::vector<double> JS;
  std::vector<double> JP_error;
  std::vector<double> JS_error;
  std::vector<double> frakF;
  std::vector<EffectiveMass> m_eff; // in units of mass (m0 included)
  std::vector<Divergence> divergences;
};

/// Samples the mass curve on the grid; divergences are refined from its sign changes.
MassCurve mass_curve(const StringState& state, const std::vector<double>& grid,
                     const QuadratureSettings& settings = {}, double divergence_eps = 1e-12);

/// E = P2/(2 m_eff) + E0 (2 int rho^2 + p). Throws DivergentMass at a divergence.
double energy(const StringState& state, double omega, const QuadratureSettings& settings = {},
              double divergence_eps = 1e-12);

/// (E, S) at each kappa with everything else fixed; E uses the finite inverse mass
/// even at a divergence, where it reduces to the internal energy.
struct EnergySpinSweep {
  std::vector<double> kappas;
  std::vector<double> E;
  std::vector<double> S;
};

EnergySpinSweep energy_spin_sweep(const StringState& state, double omega, const std::vector<double>& kappas,
                                  const QuadratureSettings& settings = {});

struct LinearFit {
  double alpha = 0.0;          // S = alpha E + C
  double intercept = 0.0;
  double max_deviation = 0.0;
  double s_range = 0.0;
  double e_range = 0.0;
  std::vector<double> kappas;
  std::vector<double> E;
  std::vector<double> S;
};

/// Least-squares line S = alpha E + C over a kappa sweep at fixed omega.
/// E uses the finite inverse mass, so it is defined at a divergence too.
/// Throws DegenerateFit when the E values agree to degeneracy_tol relative
/// (the expected outcome at a divergence frequency).
LinearFit linearity_probe(const StringState& state, double omega, const std::vector<double>& kappas,
                          const QuadratureSettings& settings = {}, double degeneracy_tol = 1e-8);

/// Internal flow over delta_xi0: bump centres c -> c - delta, q -> q + delta,
/// beta -> beta + omega delta / 2 (mod 2pi). Z, kappa, omega and p are unchanged.
StringState evolve(const StringState& state, double delta_xi0);

/// External free-particle drift Z -> Z + (delta_xi0 / gamma) P, which keeps
/// B = m0 [Z - (xi0/gamma) P] constant.
StringState drift_external(const StringState& state, double delta_xi0, const QuadratureSettings& settings = {});

/// Physical time elapsed over delta_xi0: t = (m0 / gamma) delta_xi0.
double physical_time(const PhysicalConstants& constants, double delta_xi0);

struct GalileiObservables {
  double H = 0.0;
  std::optional<double> E; // absent at a divergence
  double S = 0.0;
  cplx momentum{};
  cplx B{};
  double casimir_C3 = 0.0; // H - P2/(2 m0)
};

GalileiObservables galilei_observables(const StringState& state, double omega, double xi0,
                                       const QuadratureSettings& settings = {});

/// beta from arg(P3 + i P1) - arg I0|_{beta=0} = 2 beta, returned in [0, pi).
/// beta and beta + pi give the same frame up to T -> -T, so the momentum only
/// determines beta modulo pi. Throws ZeroMomentum if |momentum|, kappa or I0 vanish.
double recover_beta(const StringState& state_without_beta, cplx momentum,
                    const QuadratureSettings& settings = {});

struct FlowCheck {
  double rho_residual = 0.0; // max |{h_int, rho}_discrete - (gamma/m0) rho'|
  double q_rate = 0.0;       // dq/dxi0 from {h_int, q}
  double step = 0.0;
};

/// Discrete bracket check on a uniform grid: {rho_i, rho_j} = -(gamma/(4 m0 E0)) delta'_ij
/// with the centred antisymmetric stencil, applied to the discrete gradient of
/// E0 2 int rho^2. Requires at least 16 grid points per smallest bump width.
FlowCheck canonical_flow_check(const Profile& profile, const UniformGrid& grid, const PhysicalConstants& constants);

} // namespace psl
