#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qhf/model.hpp"
#include "qhf/tt_ops.hpp"

namespace qhf {

struct EvolutionSchedule {
  double t_max = 1.0;
  double dt = 0.01;
  int sample_stride = 10;  // steps between samples; t = 0 is always sampled

  void validate() const;
  int total_steps() const;
};

struct EvolutionSample {
  int step = 0;
  double time = 0.0;
  double state_norm = 1.0;
  double energy = 0.0;
  double truncation_budget = 0.0;
};

/// Evolves `state` under the operator train, invoking on_sample at stride
/// boundaries (including t = 0 and the final step) with norm and energy drift
/// diagnostics. Return false from the callback to stop early. NaN blow-ups
/// abort with numerics_error naming the last good time.
void run_evolution(const OperatorTrain& hamiltonian, TensorTrainState& state,
                   const EvolutionSchedule& schedule, const TruncationPolicy& policy,
                   const std::function<bool(const EvolutionSample&, const TensorTrainState&)>& on_sample);

struct MomentSample {
  std::vector<double> moments;   // ⟨Q̃ⁿ⟩, n = 1..n_max, symmetrized to real
  double discarded_weight = 0.0; // compression budget of the half-power states
  bool warning = false;
};

/// Moments via half-power states |φ_k⟩ = Q̃^k|Ψ⟩, k ≤ ⌈n_max/2⌉, paired into
/// ⟨φ_i|φ_j⟩ with i + j = n and normalized by ⟨Ψ|Ψ⟩. Supports n_max ≤ 4.
MomentSample heat_moments(const TensorTrainState& state, const OperatorTrain& heat_op,
                          int n_max, const TruncationPolicy& policy);

struct MomentSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> moments;  // [time][order-1]
  std::vector<double> discarded_weight;      // per time
  int n_max = 2;
  bool warning = false;

  void validate_grid(const MomentSeries& other) const;
};

struct CumulantSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> cumulants;  // [time][order-1]
  std::vector<double> fano;                    // NaN where |⟨Q⟩| < fano_floor
  int n_max = 2;

  // scaled current cumulants ⟨⟨Jⁿ⟩⟩ = ⟨⟨Δ̃ⁿ⟩⟩/t, t = 0 rows excluded
  std::vector<std::vector<double>> scaled;
};

/// Standard moment → cumulant relations up to order 4; Fano reported as NaN
/// (undefined) when |⟨Q⟩| is below fano_floor.
CumulantSeries cumulants_from_moments(const MomentSeries& ms, double fano_floor = 0.0);

/// Scaled cumulants of the integrated current from the Δ̃_Q moment series;
/// rows at t = 0 are dropped.
CumulantSeries current_statistics(const MomentSeries& delta_series, double fano_floor = 0.0);

/// Convex combination of moment series (spectral decomposition of a mixed
/// initial system state). Weights must sum to 1; identical time grids.
MomentSeries mixed_state_combine(const std::vector<std::pair<double, MomentSeries>>& runs);

struct HeatRunResult {
  std::vector<MomentSeries> series;      // one per measured operator
  std::vector<EvolutionSample> samples;  // evolution diagnostics
  bool compression_warning = false;
};

/// Evolves one pure branch and samples the moments of each operator in
/// `heat_ops` on the fly.
HeatRunResult run_heat_sampling(const OperatorTrain& hamiltonian, TensorTrainState state,
                                const std::vector<const OperatorTrain*>& heat_ops,
                                const EvolutionSchedule& schedule, const TruncationPolicy& policy,
                                int n_max);

}  // namespace qhf
