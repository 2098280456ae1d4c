#pragma once

#include <optional>

#include "qhf/config.hpp"
#include "qhf/report.hpp"
#include "qhf/stats.hpp"

namespace qhf {

struct RunArtifacts {
  RunConfig resolved;
  std::vector<MomentSeries> bath_moments;      // one per bath
  std::vector<CumulantSeries> bath_cumulants;  // matching cumulants
  std::optional<MomentSeries> delta_moments;   // Δ̃_Q series (two baths)
  std::optional<CumulantSeries> current;       // scaled current statistics
  std::vector<EvolutionSample> samples;        // diagnostics of the first branch
  std::vector<std::string> notes;              // light-cone and other warnings
  std::string term_dump;                       // Hamiltonian terms with provenance
  bool compression_warning = false;
};

/// Full pipeline for one config: thermofield split → chain mapping → layout →
/// transformed Hamiltonian and heat operators → branch evolutions → combined
/// moment/cumulant series. Mixed initial states run one branch per spectral
/// component (in parallel, bounded by QHF_THREADS) and are combined at the
/// moment level. `resume_dir` continues from a checkpoint written by a
/// previous invocation with checkpoints enabled.
RunArtifacts execute_run(RunConfig cfg, const std::string& resume_dir = "");

/// Writes results.csv (+ per-bath CSVs and current.csv for two-bath runs),
/// manifest.txt, and SVG charts into cfg.out_dir.
void write_artifacts(const RunArtifacts& artifacts);

/// Worker-pool size: QHF_THREADS when set, else min(4, hardware threads).
int thread_pool_size();

}  // namespace qhf
