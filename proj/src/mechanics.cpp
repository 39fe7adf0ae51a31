#include "psl/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "psl/errors.hpp"
#include "psl/parallel.hpp"

namespace psl {

double internal_energy(const StringState& state) {
  return state.constants.E0 * (2.0 * l2_norm_sq(state.profile) + state.p);
}

double h_int(const StringState& state, double omega, const QuadratureSettings& settings) {
  const auto& c = state.constants;
  double spin_term = 0.0;
  if (omega != 0.0) spin_term = c.gamma * omega * invariant_set(state, omega, settings).S / (2.0 * c.m0);
  return internal_energy(state) + spin_term;
}

HamiltonianValue hamiltonian(const StringState& state, double omega, const QuadratureSettings& settings,
                             const DispersionSamples* dispersion) {
  const auto& c = state.constants;
  const auto inv = invariant_set(state, omega, settings);
  HamiltonianValue out;
  out.kinetic = inv.P2 / (2.0 * c.m0);
  out.h_int = internal_energy(state) + c.gamma * omega * inv.S / (2.0 * c.m0);
  out.H = out.kinetic + out.h_int;
  out.phi1_residual = phi1_residual(state, omega, settings).residual;
  if (dispersion) out.phi2_residual = phi2_residual(state, omega, *dispersion, settings).phi2_residual;
  return out;
}

EffectiveMass effective_mass(const PhysicalConstants& constants, const InvariantSet& inv, double divergence_eps) {
  const double bracket = 1.0 + 0.5 * inv.omega * inv.JS / inv.JP;
  return {bracket / constants.m0, std::abs(bracket) < divergence_eps};
}

EffectiveMass effective_mass(const StringState& state, double omega, const QuadratureSettings& settings,
                             double divergence_eps) {
  if (omega == 0.0) return {1.0 / state.constants.m0, false};
  return effective_mass(state.constants, invariant_set(state, omega, settings), divergence_eps);
}

double frak_F(const StringState& state, double omega, const QuadratureSettings& settings) {
  const auto inv = invariant_set(state, omega, settings);
  return inv.JP + 0.5 * omega * inv.JS;
}

namespace {

std::vector<Divergence> refine_sign_changes(const StringState& state, const std::vector<double>& grid,
                                            const std::vector<double>& values, const QuadratureSettings& settings,
                                            double tol) {
  const double jp0 = std::norm(compute_I0(state, 0.0, settings).value);
  std::vector<Divergence> out;
  auto f = [&](double w) { return frak_F(state, w, settings); };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    const double b = grid[i + 1];
    const double fa = values[i];
    const double fb = values[i + 1];
    if (fa == 0.0) {
      out.push_back({a, a, a, 0.0});
      continue;
    }
    if (fa * fb >= 0.0) continue;
    boost::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
    double w = 0.5 * (root.first + root.second);
    double fw = f(w);
    // Keep whichever bracket end is closer to zero if the midpoint is worse.
    for (double cand : {root.first, root.second}) {
      const double fc = f(cand);
      if (std::abs(fc) < std::abs(fw)) {
        w = cand;
        fw = fc;
      }
    }
    if (std::abs(fw) >= tol * jp0)
      throw NonConvergence("divergence refinement in [" + std::to_string(a) + ", " + std::to_string(b) +
                           "] stalled at |frakF| = " + std::to_string(std::abs(fw)));
    out.push_back({w, a, b, std::abs(fw)});
  }
  if (!grid.empty() && values.back() == 0.0) out.push_back({grid.back(), grid.back(), grid.back(), 0.0});
  return out;
}

} // namespace

std::vector<Divergence> find_divergences(const StringState& state, double lo, double hi,
                                         const QuadratureSettings& settings, const DivergenceSettings& div) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo))
    throw ValidationError("divergences.max", "range must be finite with max > min");
  if (div.scan_points < 2) throw ValidationError("divergences.scan_points", "must be >= 2");
  const auto grid = UniformGrid(lo, hi, div.scan_points).nodes();
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = frak_F(state, grid[i], settings); });
  return refine_sign_changes(state, grid, values, settings, div.tol);
}

MassCurve mass_curve(const StringState& state, const std::vector<double>& grid,
                     const QuadratureSettings& settings, double divergence_eps) {
  MassCurve out;
  out.grid = grid;
  const auto sweep = invariant_sweep(state, grid, settings);
  for (const auto& inv : sweep) {
    out.JP.push_back(inv.JP);
    out.JS.push_back(inv.JS);
    out.JP_error.push_back(inv.JP_error);
    out.JS_error.push_back(inv.JS_error);
    out.frakF.push_back(inv.JP + 0.5 * inv.omega * inv.JS);
    out.m_eff.push_back(inv.omega == 0.0 ? EffectiveMass{1.0 / state.constants.m0, false}
                                         : effective_mass(state.constants, inv, divergence_eps));
  }
  out.divergences = refine_sign_changes(state, grid, out.frakF, settings, DivergenceSettings{}.tol);
  return out;
}

double energy(const StringState& state, double omega, const QuadratureSettings& settings, double divergence_eps) {
  const auto inv = invariant_set(state, omega, settings);
  const auto m = omega == 0.0 ? EffectiveMass{1.0 / state.constants.m0, false}
                              : effective_mass(state.constants, inv, divergence_eps);
  if (m.divergent)
    throw DivergentMass("effective mass diverges at omega = " + std::to_string(omega) +
                        "; only the internal term " + std::to_string(internal_energy(state)) + " is defined");
  return 0.5 * inv.P2 * m.inverse + internal_energy(state);
}

EnergySpinSweep energy_spin_sweep(const StringState& state, double omega, const std::vector<double>& kappas,
                                  const QuadratureSettings& settings) {
  EnergySpinSweep out;
  out.kappas = kappas;
  out.E.resize(kappas.size());
  out.S.resize(kappas.size());
  const double internal = internal_energy(state);
  parallel_for(kappas.size(), [&](std::size_t i) {
    StringState s = state;
    s.kappa = kappas[i];
    const auto inv = invariant_set(s, omega, settings);
    const double inverse = omega == 0.0 ? 1.0 / s.constants.m0 : effective_mass(s.constants, inv, 0.0).inverse;
    out.E[i] = 0.5 * inv.P2 * inverse + internal;
    out.S[i] = inv.S;
  });
  return out;
}

LinearFit linearity_probe(const StringState& state, double omega, const std::vector<double>& kappas,
                          const QuadratureSettings& settings, double degeneracy_tol) {
  std::vector<double> distinct = kappas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw ValidationError("energy_scan.kappas", "need at least 3 distinct values");

  auto sweep = energy_spin_sweep(state, omega, kappas, settings);
  LinearFit fit;
  fit.kappas = std::move(sweep.kappas);
  fit.E = std::move(sweep.E);
  fit.S = std::move(sweep.S);

  const auto [emin, emax] = std::minmax_element(fit.E.begin(), fit.E.end());
  const auto [smin, smax] = std::minmax_element(fit.S.begin(), fit.S.end());
  fit.e_range = *emax - *emin;
  fit.s_range = *smax - *smin;
  if (fit.e_range <= degeneracy_tol * std::max(1.0, std::max(std::abs(*emin), std::abs(*emax))))
    throw DegenerateFit("E is constant (range " + std::to_string(fit.e_range) + ") while S spans " +
                        std::to_string(fit.s_range) + " at omega = " + std::to_string(omega));

  const double n = static_cast<double>(kappas.size());
  double me = 0.0, ms = 0.0;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    me += fit.E[i] / n;
    ms += fit.S[i] / n;
  }
  double see = 0.0, ses = 0.0;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    see += (fit.E[i] - me) * (fit.E[i] - me);
    ses += (fit.E[i] - me) * (fit.S[i] - ms);
  }
  fit.alpha = ses / see;
  fit.intercept = ms - fit.alpha * me;
  for (std::size_t i = 0; i < kappas.size(); ++i)
    fit.max_deviation = std::max(fit.max_deviation, std::abs(fit.S[i] - (fit.alpha * fit.E[i] + fit.intercept)));
  return fit;
}

StringState evolve(const StringState& state, double delta_xi0) {
  StringState out = state;
  out.profile = state.profile.shifted(-delta_xi0);
  out.q = state.q + delta_xi0;
  out.beta = wrap_angle(state.beta + 0.5 * state.omega * delta_xi0);
  return out;
}

StringState drift_external(const StringState& state, double delta_xi0, const QuadratureSettings& settings) {
  StringState out = state;
  const cplx P = invariant_set(state, state.omega, settings).momentum;
  out.Z = state.Z + (delta_xi0 / state.constants.gamma) * P;
  return out;
}

double physical_time(const PhysicalConstants& constants, double delta_xi0) {
  return constants.m0 / constants.gamma * delta_xi0;
}

GalileiObservables galilei_observables(const StringState& state, double omega, double xi0,
                                       const QuadratureSettings& settings) {
  const auto& c = state.constants;
  const auto inv = invariant_set(state, omega, settings);
  GalileiObservables out;
  const double kinetic = inv.P2 / (2.0 * c.m0);
  out.H = kinetic + internal_energy(state) + c.gamma * omega * inv.S / (2.0 * c.m0);
  out.casimir_C3 = out.H - kinetic;
  out.S = inv.S;
  out.momentum = inv.momentum;
  out.B = c.m0 * (state.Z - (xi0 / c.gamma) * inv.momentum);
  const auto m = omega == 0.0 ? EffectiveMass{1.0 / c.m0, false} : effective_mass(c, inv);
  if (!m.divergent) out.E = 0.5 * inv.P2 * m.inverse + internal_energy(state);
  return out;
}

double recover_beta(const StringState& state_without_beta, cplx momentum, const QuadratureSettings& settings) {
  StringState s = state_without_beta;
  s.beta = 0.0;
  const cplx i0 = compute_I0(s, s.omega, settings).value;
  const cplx scale = s.constants.gamma * s.kappa * i0;
  if (std::abs(momentum) < 1e-14 || std::abs(scale) < 1e-300)
    throw ZeroMomentum("momentum vanishes; beta is undefined");
  double beta = 0.5 * std::arg(momentum / scale);
  // arg is in (-pi, pi]; fold into [0, pi), treating rounding noise around 0 as 0.
  if (beta < -1e-13) beta += std::numbers::pi;
  return std::max(beta, 0.0);
}

FlowCheck canonical_flow_check(const Profile& profile, const UniformGrid& grid, const PhysicalConstants& constants) {
  constants.validate();
  const double h = grid.step();
  for (const auto& b : profile.bumps())
    if (h > b.w / 16.0) throw ValidationError("grid", "step must resolve every bump width with >= 16 points");

  const int n = grid.size();
  std::vector<double> rho(n), grad(n);
  for (int i = 0; i < n; ++i) {
    rho[i] = eval_rho(profile, grid[i]);
    grad[i] = 4.0 * constants.E0 * h * rho[i]; // d/d rho_i of E0 * 2 * sum h rho^2
  }
  // {rho_i, rho_k} = -c * (delta_{i+1,k} - delta_{i-1,k}) / (2 h^2)
  const double c = constants.gamma / (4.0 * constants.m0 * constants.E0);
  FlowCheck out;
  out.step = h;
  for (int k = 0; k < n; ++k) {
    double flow = 0.0;
    if (k >= 1) flow += grad[k - 1] * (-c) / (2.0 * h * h);
    if (k + 1 < n) flow -= grad[k + 1] * (-c) / (2.0 * h * h);
    const double exact = constants.gamma / constants.m0 * eval_rho_prime(profile, grid[k]);
    out.rho_residual = std::max(out.rho_residual, std::abs(flow - exact));
  }
  // {h_int, q} = (d h_int / d p) {p, q} with d h_int / d p = E0; convert to xi0-time.
  const double bracket_pq = constants.gamma / (constants.m0 * constants.E0);
  out.q_rate = constants.E0 * bracket_pq * physical_time(constants, 1.0);
  return out;
}

} // namespace psl
