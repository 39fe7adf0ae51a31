#include "psl/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "psl/errors.hpp"

namespace psl {

std::vector<double> OmegaGrid::nodes() const { return UniformGrid(min, max, n).nodes(); }

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
  const json& j = parent.at(key);
  if (!j.is_object()) throw ValidationError(join(path, key), "expected an object");
  return j;
}

void reject_unknown(const json& j, const std::string& path, std::set<std::string> known) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ValidationError(join(path, key), "unknown key");
}

void read_number(const json& j, const std::string& key, const std::string& path, double& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(join(path, key), "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) throw ValidationError(join(path, key), "must be finite");
}

void read_int(const json& j, const std::string& key, const std::string& path, int& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(join(path, key), "expected an integer");
  out = v.get<int>();
}

void read_optional(const json& j, const std::string& key, const std::string& path, std::optional<double>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  double v = 0.0;
  read_number(j, key, path, v);
  out = v;
}

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw ValidationError(field, "must be > 0");
}

} // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ValidationError("config", "expected a JSON object");
  reject_unknown(j, "", {"constants", "state", "numerics", "index", "nullspace", "divergences", "evolve",
                         "worldsheet", "cusps", "energy_scan"});
  RunConfig cfg;

  if (j.contains("constants")) {
    const json& c = object_at(j, "constants", "");
    reject_unknown(c, "constants", {"gamma", "m0", "E0"});
    read_number(c, "gamma", "constants", cfg.state.constants.gamma);
    read_number(c, "m0", "constants", cfg.state.constants.m0);
    read_number(c, "E0", "constants", cfg.state.constants.E0);
  }
  cfg.state.constants.validate();

  if (j.contains("state")) {
    const json& s = object_at(j, "state", "");
    reject_unknown(s, "state", {"kappa", "beta", "p", "q", "omega", "Z", "rho"});
    read_number(s, "kappa", "state", cfg.state.kappa);
    read_number(s, "beta", "state", cfg.state.beta);
    read_number(s, "p", "state", cfg.state.p);
    read_number(s, "q", "state", cfg.state.q);
    read_number(s, "omega", "state", cfg.state.omega);
    if (s.contains("Z")) {
      const json& z = s.at("Z");
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw ValidationError("state.Z", "expected [x3, x1]");
      cfg.state.Z = cplx(z[0].get<double>(), z[1].get<double>());
    }
    if (s.contains("rho")) cfg.state.profile = profile_from_json(s.at("rho"), "state.rho");
  }
  cfg.state = cfg.state.normalized();

  if (j.contains("numerics")) {
    const json& n = object_at(j, "numerics", "");
    reject_unknown(n, "numerics", {"rel_tol", "abs_tol", "truncation_eps", "max_panels", "oscillation_guard",
                                   "omega_grid", "divergence_eps", "dispersion_step"});
    read_number(n, "rel_tol", "numerics", cfg.numerics.rel_tol);
    read_number(n, "abs_tol", "numerics", cfg.numerics.abs_tol);
    read_number(n, "truncation_eps", "numerics", cfg.numerics.truncation_eps);
    read_int(n, "max_panels", "numerics", cfg.numerics.max_panels);
    read_number(n, "oscillation_guard", "numerics", cfg.numerics.oscillation_guard);
    read_number(n, "divergence_eps", "numerics", cfg.divergence_eps);
    read_number(n, "dispersion_step", "numerics", cfg.dispersion_step);
    if (n.contains("omega_grid")) {
      const json& g = object_at(n, "omega_grid", "numerics");
      reject_unknown(g, "numerics.omega_grid", {"min", "max", "n"});
      read_number(g, "min", "numerics.omega_grid", cfg.omega_grid.min);
      read_number(g, "max", "numerics.omega_grid", cfg.omega_grid.max);
      read_int(g, "n", "numerics.omega_grid", cfg.omega_grid.n);
    }
  }
  cfg.numerics.validate();
  require_positive(cfg.divergence_eps, "numerics.divergence_eps");
  require_positive(cfg.dispersion_step, "numerics.dispersion_step");
  if (cfg.omega_grid.n < 2) throw ValidationError("numerics.omega_grid.n", "must be >= 2");
  if (!(cfg.omega_grid.max > cfg.omega_grid.min))
    throw ValidationError("numerics.omega_grid.max", "must be > numerics.omega_grid.min");

  if (j.contains("index")) {
    const json& b = object_at(j, "index", "");
    reject_unknown(b, "index", {"omega_max", "samples"});
    read_number(b, "omega_max", "index", cfg.index.omega_max);
    read_int(b, "samples", "index", cfg.index.samples);
  }
  require_positive(cfg.index.omega_max, "index.omega_max");
  if (cfg.index.samples < 3) throw ValidationError("index.samples", "must be >= 3");

  if (j.contains("nullspace")) {
    const json& b = object_at(j, "nullspace", "");
    reject_unknown(b, "nullspace", {"half_span", "n", "threshold"});
    read_number(b, "half_span", "nullspace", cfg.nullspace.half_span);
    read_int(b, "n", "nullspace", cfg.nullspace.n);
    read_number(b, "threshold", "nullspace", cfg.nullspace.threshold);
  }
  require_positive(cfg.nullspace.half_span, "nullspace.half_span");
  require_positive(cfg.nullspace.threshold, "nullspace.threshold");
  if (cfg.nullspace.n < 9) throw ValidationError("nullspace.n", "must be >= 9");

  if (j.contains("divergences")) {
    const json& b = object_at(j, "divergences", "");
    reject_unknown(b, "divergences", {"min", "max", "scan_points", "tol"});
    read_optional(b, "min", "divergences", cfg.divergences.min);
    read_optional(b, "max", "divergences", cfg.divergences.max);
    read_int(b, "scan_points", "divergences", cfg.divergences.settings.scan_points);
    read_number(b, "tol", "divergences", cfg.divergences.settings.tol);
  }
  if (cfg.divergences.settings.scan_points < 2) throw ValidationError("divergences.scan_points", "must be >= 2");
  require_positive(cfg.divergences.settings.tol, "divergences.tol");
  if (cfg.divergences.min.value_or(cfg.omega_grid.min) >= cfg.divergences.max.value_or(cfg.omega_grid.max))
    throw ValidationError("divergences.max", "must be > divergences.min");

  if (j.contains("evolve")) {
    const json& b = object_at(j, "evolve", "");
    reject_unknown(b, "evolve", {"delta"});
    read_number(b, "delta", "evolve", cfg.evolve_delta);
  }

  if (j.contains("worldsheet")) {
    const json& b = object_at(j, "worldsheet", "");
    reject_unknown(b, "worldsheet", {"xi0_min", "xi0_max", "xi0_points", "xi1_max", "xi1_points"});
    read_number(b, "xi0_min", "worldsheet", cfg.worldsheet.xi0_min);
    read_number(b, "xi0_max", "worldsheet", cfg.worldsheet.xi0_max);
    read_int(b, "xi0_points", "worldsheet", cfg.worldsheet.xi0_points);
    read_number(b, "xi1_max", "worldsheet", cfg.worldsheet.xi1_max);
    read_int(b, "xi1_points", "worldsheet", cfg.worldsheet.xi1_points);
  }
  if (!(cfg.worldsheet.xi0_max > cfg.worldsheet.xi0_min))
    throw ValidationError("worldsheet.xi0_max", "must be > worldsheet.xi0_min");
  require_positive(cfg.worldsheet.xi1_max, "worldsheet.xi1_max");
  if (cfg.worldsheet.xi0_points < 2) throw ValidationError("worldsheet.xi0_points", "must be >= 2");
  if (cfg.worldsheet.xi1_points < 2) throw ValidationError("worldsheet.xi1_points", "must be >= 2");

  if (j.contains("cusps")) {
    const json& b = object_at(j, "cusps", "");
    reject_unknown(b, "cusps", {"xi0_min", "xi0_max", "xi1_min", "xi1_max", "xi0_points", "xi1_points", "tol"});
    read_number(b, "xi0_min", "cusps", cfg.cusps.xi0_min);
    read_number(b, "xi0_max", "cusps", cfg.cusps.xi0_max);
    read_number(b, "xi1_min", "cusps", cfg.cusps.xi1_min);
    read_number(b, "xi1_max", "cusps", cfg.cusps.xi1_max);
    read_int(b, "xi0_points", "cusps", cfg.cusps.xi0_points);
    read_int(b, "xi1_points", "cusps", cfg.cusps.xi1_points);
    read_number(b, "tol", "cusps", cfg.cusps.tol);
  }
  cfg.cusps.validate();

  if (j.contains("energy_scan")) {
    const json& b = object_at(j, "energy_scan", "");
    reject_unknown(b, "energy_scan", {"omega", "kappas", "degeneracy_tol"});
    read_optional(b, "omega", "energy_scan", cfg.energy_scan.omega);
    read_number(b, "degeneracy_tol", "energy_scan", cfg.energy_scan.degeneracy_tol);
    if (b.contains("kappas")) {
      const json& k = b.at("kappas");
      if (!k.is_array()) throw ValidationError("energy_scan.kappas", "expected an array of numbers");
      cfg.energy_scan.kappas.clear();
      for (std::size_t i = 0; i < k.size(); ++i) {
        if (!k[i].is_number() || !std::isfinite(k[i].get<double>()))
          throw ValidationError("energy_scan.kappas[" + std::to_string(i) + "]", "expected a finite number");
        cfg.energy_scan.kappas.push_back(k[i].get<double>());
      }
    }
  }
  require_positive(cfg.energy_scan.degeneracy_tol, "energy_scan.degeneracy_tol");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json RunConfig::to_json() const {
  using oj = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? oj(*v) : oj(nullptr); };
  oj out;
  out["constants"] = {{"gamma", state.constants.gamma}, {"m0", state.constants.m0}, {"E0", state.constants.E0}};
  out["state"] = {{"kappa", state.kappa},
                  {"beta", state.beta},
                  {"p", state.p},
                  {"q", state.q},
                  {"omega", state.omega},
                  {"Z", {state.Z.real(), state.Z.imag()}},
                  {"rho", profile_to_json(state.profile)}};
  out["numerics"] = {{"rel_tol", numerics.rel_tol},
                     {"abs_tol", numerics.abs_tol},
                     {"truncation_eps", numerics.truncation_eps},
                     {"max_panels", numerics.max_panels},
                     {"oscillation_guard", numerics.oscillation_guard},
                     {"omega_grid", {{"min", omega_grid.min}, {"max", omega_grid.max}, {"n", omega_grid.n}}},
                     {"divergence_eps", divergence_eps},
                     {"dispersion_step", dispersion_step}};
  out["index"] = {{"omega_max", index.omega_max}, {"samples", index.samples}};
  out["nullspace"] = {{"half_span", nullspace.half_span}, {"n", nullspace.n}, {"threshold", nullspace.threshold}};
  out["divergences"] = {{"min", opt(divergences.min)},
                        {"max", opt(divergences.max)},
                        {"scan_points", divergences.settings.scan_points},
                        {"tol", divergences.settings.tol}};
  out["evolve"] = {{"delta", evolve_delta}};
  out["worldsheet"] = {{"xi0_min", worldsheet.xi0_min},
                       {"xi0_max", worldsheet.xi0_max},
                       {"xi0_points", worldsheet.xi0_points},
                       {"xi1_max", worldsheet.xi1_max},
                       {"xi1_points", worldsheet.xi1_points}};
  out["cusps"] = {{"xi0_min", cusps.xi0_min},       {"xi0_max", cusps.xi0_max},
                  {"xi1_min", cusps.xi1_min},       {"xi1_max", cusps.xi1_max},
                  {"xi0_points", cusps.xi0_points}, {"xi1_points", cusps.xi1_points},
                  {"tol", cusps.tol}};
  out["energy_scan"] = {{"omega", opt(energy_scan.omega)},
                        {"kappas", energy_scan.kappas},
                        {"degeneracy_tol", energy_scan.degeneracy_tol}};
  return out;
}

} // namespace psl
