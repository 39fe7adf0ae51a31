#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "psl/mechanics.hpp"
#include "psl/worldsheet.hpp"

namespace psl {

struct OmegaGrid {
  double min = -4.0;
  double max = 4.0;
  int n = 33;
  std::vector<double> nodes() const;
};

struct IndexBlock {
  double omega_max = 20.0;
  int samples = 401;
};

struct NullspaceBlock {
  double half_span = 8.0;
  int n = 321;
  double threshold = 1e-6;
};

struct DivergenceBlock {
  std::optional<double> min; // default: omega_grid.min
  std::optional<double> max; // default: omega_grid.max
  DivergenceSettings settings;
};

struct WorldsheetBlock {
  double xi0_min = -2.0;
  double xi0_max = 2.0;
  int xi0_points = 21;
  double xi1_max = 4.0;
  int xi1_points = 41;
};

struct EnergyScanBlock {
  std::optional<double> omega; // default: state.omega
  std::vector<double> kappas{0.5, 1.0, 1.5, 2.0, 2.5};
  double degeneracy_tol = 1e-8;
};

/// Everything a CLI run needs; missing optional keys take the defaults above.
struct RunConfig {
  StringState state;
  QuadratureSettings numerics;
  OmegaGrid omega_grid;
  double divergence_eps = 1e-12;
  double dispersion_step = 0.025;
  IndexBlock index;
  NullspaceBlock nullspace;
  DivergenceBlock divergences;
  double evolve_delta = 1.0;
  WorldsheetBlock worldsheet;
  CuspSearch cusps;
  EnergyScanBlock energy_scan;

  /// Effective configuration with every default filled in; parses back to an equal config.
  nlohmann::ordered_json to_json() const;
};

/// Throws ValidationError naming the offending field (e.g. "state.rho.bumps[0].w").
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

} // namespace psl
