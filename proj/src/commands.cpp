#include "psl/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "psl/errors.hpp"
#include "psl/parallel.hpp"

namespace psl {

namespace fs = std::filesystem;
using oj = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

oj complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

class Csv {
public:
  Csv(const RunConfig& cfg, std::vector<std::string> columns) : width_(columns.size()) {
    text_ = "# config: " + cfg.to_json().dump() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
    text_ += "\n";
  }
  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + format_double(values[i]);
    text_ += "\n";
  }
  const std::string& text() const { return text_; }

private:
  std::size_t width_;
  std::string text_;
};

struct Writer {
  const RunConfig& cfg;
  fs::path dir;
  std::string command;
  std::vector<fs::path> written;

  void file(const std::string& name, const std::string& content) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  }
  void json(const std::string& name, const oj& result) {
    oj doc;
    doc["command"] = command;
    doc["config"] = cfg.to_json();
    doc["result"] = result;
    file(name, doc.dump(2) + "\n");
  }
  void csv(const std::string& name, const Csv& table) { file(name, table.text()); }
};

oj invariant_json(const InvariantSet& inv) {
  return {{"omega", inv.omega},
          {"I0", complex_json(inv.I0)},
          {"JP", inv.JP},
          {"JS", inv.JS},
          {"momentum", {{"P3", inv.momentum.real()}, {"P1", inv.momentum.imag()}}},
          {"P2", inv.P2},
          {"S", inv.S},
          {"error_budget", {{"I0", inv.I0_error}, {"JP", inv.JP_error}, {"JS", inv.JS_error}}}};
}

void cmd_invariants(Writer& w) {
  const auto& s = w.cfg.state;
  w.json("invariants.json", invariant_json(invariant_set(s, s.omega, w.cfg.numerics)));
}

void cmd_mass_curve(Writer& w) {
  const auto curve = mass_curve(w.cfg.state, w.cfg.omega_grid.nodes(), w.cfg.numerics, w.cfg.divergence_eps);
  Csv t(w.cfg, {"omega", "JP", "JS", "JP_error", "JS_error", "frakF", "m_eff_inverse", "m_eff", "divergent"});
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const auto& m = curve.m_eff[i];
    t.row({curve.grid[i], curve.JP[i], curve.JS[i], curve.JP_error[i], curve.JS_error[i], curve.frakF[i], m.inverse,
           m.value().value_or(INFINITY), m.divergent ? 1.0 : 0.0});
  }
  w.csv("mass_curve.csv", t);
}

oj divergence_json(const Divergence& d) {
  return {{"omega", d.omega}, {"bracket", {d.bracket_lo, d.bracket_hi}}, {"abs_frakF", d.residual}};
}

void cmd_divergences(Writer& w) {
  const auto& b = w.cfg.divergences;
  const double lo = b.min.value_or(w.cfg.omega_grid.min);
  const double hi = b.max.value_or(w.cfg.omega_grid.max);
  const auto found = find_divergences(w.cfg.state, lo, hi, w.cfg.numerics, b.settings);
  oj list = oj::array();
  for (const auto& d : found) list.push_back(divergence_json(d));
  w.json("divergences.json", {{"range", {lo, hi}}, {"divergences", list}});
}

void cmd_dispersion_check(Writer& w) {
  const auto& s = w.cfg.state;
  const auto grid = dispersion_grid(s, w.cfg.numerics, w.cfg.dispersion_step);
  const auto samples = sample_dispersion(s, grid, w.cfg.numerics);
  const auto omegas = w.cfg.omega_grid.nodes();
  std::vector<ConstraintReport> rows(omegas.size());
  parallel_for(omegas.size(), [&](std::size_t i) { rows[i] = phi2_residual(s, omegas[i], samples, w.cfg.numerics); });

  Csv t(w.cfg, {"omega", "dispersion_residual", "dispersion_budget", "phi2_residual", "phi2_budget"});
  double max_res = 0.0, max_budget = 0.0, max_excess = -INFINITY;
  for (const auto& r : rows) {
    t.row({r.omega, r.dispersion_residual, r.dispersion_budget, r.phi2_residual, r.phi2_error_budget});
    max_res = std::max(max_res, std::abs(r.dispersion_residual));
    max_budget = std::max(max_budget, r.dispersion_budget);
    max_excess = std::max(max_excess, std::abs(r.dispersion_residual) - r.dispersion_budget);
  }
  w.csv("dispersion.csv", t);
  w.json("dispersion_summary.json", {{"hilbert_grid", {{"min", grid.lo()}, {"max", grid.hi()}, {"n", grid.size()}}},
                                     {"max_abs_dispersion_residual", max_res},
                                     {"max_dispersion_budget", max_budget},
                                     {"within_budget", max_excess <= 0.0}});
}

void cmd_phi1_check(Writer& w) {
  const auto omegas = w.cfg.omega_grid.nodes();
  std::vector<Phi1Result> rows(omegas.size());
  parallel_for(omegas.size(),
               [&](std::size_t i) { rows[i] = phi1_residual(w.cfg.state, omegas[i], w.cfg.numerics); });
  Csv t(w.cfg, {"omega", "phi1_residual", "scale", "relative"});
  for (std::size_t i = 0; i < omegas.size(); ++i)
    t.row({omegas[i], rows[i].residual, rows[i].scale, rows[i].relative()});
  w.csv("phi1.csv", t);
}

void cmd_index(Writer& w) {
  const auto r = winding_index(w.cfg.state, w.cfg.index.omega_max, w.cfg.index.samples, w.cfg.numerics);
  w.json("index.json", {{"winding_index", r.index},
                        {"segment_turns", r.segment_turns},
                        {"closure_turns", r.closure_turns},
                        {"samples", r.samples},
                        {"min_re_g", r.min_re_g},
                        {"omega_max", w.cfg.index.omega_max}});
}

void cmd_nullspace(Writer& w) {
  const auto& b = w.cfg.nullspace;
  const auto grid = UniformGrid::symmetric(b.half_span, b.n);
  auto a = nullspace_analysis(dominant_operator_matrix(w.cfg.state, grid, w.cfg.numerics), b.threshold);
  a.grid = grid.nodes();
  a.winding_index = winding_index(w.cfg.state, w.cfg.index.omega_max, w.cfg.index.samples, w.cfg.numerics).index;
  w.json("nullspace.json", {{"grid", {{"min", grid.lo()}, {"max", grid.hi()}, {"n", grid.size()}}},
                            {"matrix_dim", a.matrix_dim},
                            {"singular_values", a.singular_values},
                            {"threshold_ratio", a.threshold_ratio},
                            {"nullspace_dim", a.nullspace_dim},
                            {"winding_index", *a.winding_index},
                            {"constant_solution_residual", a.constant_solution_residual},
                            {"null_vector", a.null_vector}});
}

oj observables_json(const GalileiObservables& g) {
  return {{"H", g.H},
          {"E", g.E ? oj(*g.E) : oj(nullptr)},
          {"S", g.S},
          {"momentum", {{"P3", g.momentum.real()}, {"P1", g.momentum.imag()}}},
          {"B", {{"B3", g.B.real()}, {"B1", g.B.imag()}}},
          {"casimir_C3", g.casimir_C3}};
}

double relative_change(double before, double after) {
  const double scale = std::max(std::abs(before), std::abs(after));
  return scale > 0.0 ? std::abs(after - before) / scale : 0.0;
}

void cmd_evolve(Writer& w) {
  const auto& s = w.cfg.state;
  const double delta = w.cfg.evolve_delta;
  const StringState next = drift_external(evolve(s, delta), delta, w.cfg.numerics);
  const auto before = galilei_observables(s, s.omega, 0.0, w.cfg.numerics);
  const auto after = galilei_observables(next, s.omega, delta, w.cfg.numerics);

  RunConfig evolved = w.cfg;
  evolved.state = next;
  w.file("evolved_config.json", evolved.to_json().dump(2) + "\n");

  oj changes;
  changes["P"] = std::abs(after.momentum - before.momentum) / std::max(std::abs(before.momentum), 1e-300);
  changes["S"] = relative_change(before.S, after.S);
  changes["H"] = relative_change(before.H, after.H);
  changes["E"] = before.E && after.E ? oj(relative_change(*before.E, *after.E)) : oj(nullptr);
  changes["B"] = std::abs(after.B - before.B) / std::max(std::abs(before.B), 1.0);
  w.json("conservation.json", {{"delta_xi0", delta},
                               {"delta_t", physical_time(s.constants, delta)},
                               {"before", observables_json(before)},
                               {"after", observables_json(after)},
                               {"relative_change", changes}});
}

void cmd_worldsheet(Writer& w) {
  const auto& b = w.cfg.worldsheet;
  const auto xi0 = UniformGrid(b.xi0_min, b.xi0_max, b.xi0_points).nodes();
  const auto xi1 = UniformGrid(0.0, b.xi1_max, b.xi1_points).nodes();
  const auto patch = reconstruct(w.cfg.state, xi0, xi1, w.cfg.numerics);
  Csv t(w.cfg, {"xi0", "xi1", "X3", "X1", "X_error", "dX_dxi1_3", "dX_dxi1_1"});
  for (std::size_t i = 0; i < xi0.size(); ++i)
    for (std::size_t j = 0; j < xi1.size(); ++j) {
      const std::size_t k = patch.index(i, j);
      const cplx tangent = patch.d_plus[k] + patch.d_minus[k];
      t.row({xi0[i], xi1[j], patch.positions[k].real(), patch.positions[k].imag(), patch.position_errors[k],
             tangent.real(), tangent.imag()});
    }
  w.csv("worldsheet.csv", t);
}

void cmd_cusps(Writer& w) {
  const auto r = find_cusps(w.cfg.state, w.cfg.cusps, w.cfg.numerics);
  oj list = oj::array();
  for (const auto& c : r.cusps)
    list.push_back({{"xi0", c.xi0},
                    {"xi1", c.xi1},
                    {"position", {{"X3", c.position.real()}, {"X1", c.position.imag()}}},
                    {"residual", c.residual},
                    {"relative_residual", c.relative_residual}});
  w.json("cusps.json", {{"degenerate", r.degenerate},
                        {"resolution", {{"xi0_points", r.xi0_points}, {"xi1_points", r.xi1_points}}},
                        {"cusps", list}});
}

void cmd_energy_scan(Writer& w) {
  const auto& b = w.cfg.energy_scan;
  const double omega = b.omega.value_or(w.cfg.state.omega);
  oj result;
  result["omega"] = omega;
  LinearFit fit;
  try {
    fit = linearity_probe(w.cfg.state, omega, b.kappas, w.cfg.numerics, b.degeneracy_tol);
    result["degenerate"] = false;
    result["fit"] = {{"alpha", fit.alpha},
                     {"intercept", fit.intercept},
                     {"max_deviation", fit.max_deviation},
                     {"e_range", fit.e_range},
                     {"s_range", fit.s_range}};
  } catch (const DegenerateFit& e) {
    // Still report the samples: a constant E over a spread of S is the finding.
    result["degenerate"] = true;
    result["message"] = e.what();
    const auto sweep = energy_spin_sweep(w.cfg.state, omega, b.kappas, w.cfg.numerics);
    fit.kappas = sweep.kappas;
    fit.E = sweep.E;
    fit.S = sweep.S;
  }
  Csv t(w.cfg, {"kappa", "E", "S"});
  for (std::size_t i = 0; i < fit.kappas.size(); ++i) t.row({fit.kappas[i], fit.E[i], fit.S[i]});
  w.csv("energy_scan.csv", t);
  w.json("energy_fit.json", result);
}

const std::map<std::string, std::function<void(Writer&)>>& registry() {
  static const std::map<std::string, std::function<void(Writer&)>> table{
      {"invariants", cmd_invariants},     {"mass-curve", cmd_mass_curve},
      {"divergences", cmd_divergences},   {"dispersion-check", cmd_dispersion_check},
      {"phi1-check", cmd_phi1_check},     {"index", cmd_index},
      {"nullspace", cmd_nullspace},       {"evolve", cmd_evolve},
      {"worldsheet", cmd_worldsheet},     {"cusps", cmd_cusps},
      {"energy-scan", cmd_energy_scan}};
  return table;
}

} // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"invariants", "mass-curve", "divergences", "dispersion-check",
                                              "phi1-check", "index",      "nullspace",   "evolve",
                                              "worldsheet", "cusps",      "energy-scan"};
  return names;
}

std::vector<fs::path> run_command(const std::string& command, const RunConfig& config, const fs::path& out_dir) {
  const auto it = registry().find(command);
  if (it == registry().end()) throw ValidationError("command", "unknown command '" + command + "'");
  fs::create_directories(out_dir);
  Writer w{config, out_dir, command, {}};
  it->second(w);
  return w.written;
}

} // namespace psl
