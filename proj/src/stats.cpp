#include "qhf/stats.hpp"

#include <cmath>
#include <sstream>

namespace qhf {

void EvolutionSchedule::validate() const {
  if (!(t_max > 0.0)) throw domain_error("t_max must be positive");
  if (!(dt > 0.0)) throw domain_error("dt must be positive");
  if (sample_stride < 1) throw domain_error("sample_stride must be >= 1");
}

int EvolutionSchedule::total_steps() const {
  return static_cast<int>(std::llround(t_max / dt));
}

void run_evolution(const OperatorTrain& hamiltonian, TensorTrainState& state,
                   const EvolutionSchedule& schedule, const TruncationPolicy& policy,
                   const std::function<bool(const EvolutionSample&, const TensorTrainState&)>& on_sample) {
  schedule.validate();
  policy.validate();

  auto emit = [&](int step) {
    EvolutionSample s;
    s.step = step;
    s.time = step * schedule.dt;
    s.state_norm = norm(state);
    s.energy = std::real(expectation(state, hamiltonian)) / (s.state_norm * s.state_norm);
    s.truncation_budget = state.truncation_budget;
    return on_sample(s, state);
  };

  if (!emit(0)) return;
  const int steps = schedule.total_steps();
  for (int step = 1; step <= steps; ++step) {
    try {
      evolve_step(state, hamiltonian, schedule.dt, policy);
    } catch (const numerics_error& e) {
      throw numerics_error(std::string(e.what()) + "; last good time t = " +
                           std::to_string((step - 1) * schedule.dt));
    }
    const bool at_sample = step % schedule.sample_stride == 0 || step == steps;
    if (at_sample && !emit(step)) return;
  }
}

MomentSample heat_moments(const TensorTrainState& state, const OperatorTrain& heat_op,
                          int n_max, const TruncationPolicy& policy) {
  if (n_max < 1 || n_max > 4) throw domain_error("heat moment order must be in 1..4");

  MomentSample out;
  out.moments.assign(n_max, 0.0);

  const double norm2 = std::abs(inner(state, state));
  if (norm2 <= 0.0) throw domain_error("heat_moments: zero state");

  // first moment by exact contraction; half-power states carry the rest
  out.moments[0] = std::real(expectation(state, heat_op)) / norm2;
  if (n_max == 1) return out;

  TensorTrainState phi1 = apply_operator(state, heat_op, policy);
  out.discarded_weight = phi1.truncation_budget - state.truncation_budget;
  out.warning = phi1.compression_warning;

  out.moments[1] = std::real(inner(phi1, phi1)) / norm2;
  if (n_max >= 3) {
    TensorTrainState phi2 = apply_operator(phi1, heat_op, policy);
    out.discarded_weight += phi2.truncation_budget - phi1.truncation_budget;
    out.warning = out.warning || phi2.compression_warning;
    out.moments[2] = std::real(inner(phi1, phi2)) / norm2;
    if (n_max >= 4) out.moments[3] = std::real(inner(phi2, phi2)) / norm2;
  }
  return out;
}

void MomentSeries::validate_grid(const MomentSeries& other) const {
  if (times.size() != other.times.size()) throw domain_error("moment series grids differ in length");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - other.times[i]) > 1e-12)
      throw domain_error("moment series grids differ at index " + std::to_string(i));
}

CumulantSeries cumulants_from_moments(const MomentSeries& ms, double fano_floor) {
  CumulantSeries cs;
  cs.times = ms.times;
  cs.n_max = ms.n_max;
  cs.cumulants.resize(ms.times.size());
  cs.fano.resize(ms.times.size());
  for (std::size_t i = 0; i < ms.times.size(); ++i) {
    const std::vector<double>& m = ms.moments[i];
    if (static_cast<int>(m.size()) < ms.n_max)
      throw domain_error("moment series is missing requested orders");
    std::vector<double>& c = cs.cumulants[i];
    c.resize(ms.n_max);
    const double m1 = m[0];
    c[0] = m1;
    if (ms.n_max >= 2) c[1] = m[1] - m1 * m1;
    if (ms.n_max >= 3) c[2] = m[2] - 3.0 * m[1] * m1 + 2.0 * m1 * m1 * m1;
    if (ms.n_max >= 4)
      c[3] = m[3] - 4.0 * m[2] * m1 - 3.0 * m[1] * m[1] + 12.0 * m[1] * m1 * m1 -
             6.0 * m1 * m1 * m1 * m1;
    cs.fano[i] = (ms.n_max >= 2 && std::abs(m1) > fano_floor)
                     ? c[1] / m1
                     : std::numeric_limits<double>::quiet_NaN();
  }
  return cs;
}

CumulantSeries current_statistics(const MomentSeries& delta_series, double fano_floor) {
  CumulantSeries base = cumulants_from_moments(delta_series, fano_floor);
  CumulantSeries out;
  out.n_max = base.n_max;
  for (std::size_t i = 0; i < base.times.size(); ++i) {
    const double t = base.times[i];
    if (t <= 0.0) continue;  // J(t) undefined at t = 0
    out.times.push_back(t);
    out.cumulants.push_back(base.cumulants[i]);
    out.fano.push_back(base.fano[i]);  // Fano of J equals Fano of Δ̃ (t cancels)
    std::vector<double> scaled(base.cumulants[i].size());
    for (std::size_t n = 0; n < scaled.size(); ++n) scaled[n] = base.cumulants[i][n] / t;
    out.scaled.push_back(std::move(scaled));
  }
  return out;
}

MomentSeries mixed_state_combine(const std::vector<std::pair<double, MomentSeries>>& runs) {
  if (runs.empty()) throw domain_error("mixed_state_combine: no runs");
  double total = 0.0;
  for (const auto& [p, _] : runs) {
    if (p < 0.0) throw domain_error("mixture weights must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw domain_error("mixture weights must sum to 1");

  const MomentSeries& first = runs.front().second;
  MomentSeries out;
  out.times = first.times;
  out.n_max = first.n_max;
  out.moments.assign(first.times.size(), std::vector<double>(first.n_max, 0.0));
  out.discarded_weight.assign(first.times.size(), 0.0);
  for (const auto& [p, series] : runs) {
    first.validate_grid(series);
    if (series.n_max != first.n_max) throw domain_error("mixed runs have different n_max");
    out.warning = out.warning || series.warning;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      for (int n = 0; n < out.n_max; ++n) out.moments[i][n] += p * series.moments[i][n];
      out.discarded_weight[i] += p * series.discarded_weight[i];
    }
  }
  return out;
}

HeatRunResult run_heat_sampling(const OperatorTrain& hamiltonian, TensorTrainState state,
                                const std::vector<const OperatorTrain*>& heat_ops,
                                const EvolutionSchedule& schedule, const TruncationPolicy& policy,
                                int n_max) {
  HeatRunResult result;
  result.series.resize(heat_ops.size());
  for (auto& s : result.series) s.n_max = n_max;

  run_evolution(hamiltonian, state, schedule, policy,
                [&](const EvolutionSample& sample, const TensorTrainState& psi) {
                  result.samples.push_back(sample);
                  for (std::size_t k = 0; k < heat_ops.size(); ++k) {
                    MomentSample m = heat_moments(psi, *heat_ops[k], n_max, policy);
                    MomentSeries& series = result.series[k];
                    series.times.push_back(sample.time);
                    series.moments.push_back(std::move(m.moments));
                    series.discarded_weight.push_back(sample.truncation_budget +
                                                      m.discarded_weight);
                    series.warning = series.warning || m.warning;
                    result.compression_warning |= m.warning;
                  }
                  return true;
                });
  result.compression_warning |= state.compression_warning;
  return result;
}

}  // namespace qhf
