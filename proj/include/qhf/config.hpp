#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qhf/common.hpp"

namespace qhf {

struct BathConfig {
  double alpha = 0.0;
  double omega_c = 0.0;
  double temperature = 0.0;
  std::string table;      // path to a tabulated (ω, J) file; overrides alpha/omega_c
  double domain_max = 0.0;  // 0 → spectral-density default
};

/// One batch run: model, baths, numerics, output — the key-value sections of a
/// config file. Every default is materialized by resolve_defaults() and
/// recorded in the output manifest.
struct RunConfig {
  // [model]
  double epsilon0 = 0.0;
  double delta = 0.0;
  std::string initial_state = "plus_x";

  // [bath] (repeated section, one per bath)
  std::vector<BathConfig> baths;

  // [numerics]
  int chain_length = 0;  // 0 → light-cone based default
  int local_dim = 8;
  int local_dim_min = 4;
  int taper_sites = -1;
  int max_bond = 64;
  double svd_cutoff = 1e-10;
  double dt = 0.0;        // 0 → 0.01 / max(ω_C, ε₀)
  double t_max = 1.0;
  int sample_stride = 0;  // 0 → samples roughly every 0.1 time units
  int n_max = 2;
  int quad_nodes = 0;     // 0 → discretization default
  unsigned seed = 0;

  // [output]
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_svg = true;
  bool strict = false;
  bool checkpoints = false;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_stream(std::istream& in, const std::string& name);

  void validate() const;
  /// Fills dt and sample_stride defaults (chain_length resolution needs the
  /// chains themselves and happens in the runner).
  void resolve_time_defaults();

  /// Resolved config as config-file text; re-running from it reproduces the run.
  std::string to_config_text() const;
};

}  // namespace qhf
