#include "qhf/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qhf/oracles.hpp"
#include "qhf/runner.hpp"

namespace qhf::verify {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// desk-scale independent-boson run: ε₀ = 0, Δ = 1, Ohmic ω_C = 5, |+⟩_x start.
// The discretization domain is 6 ω_C so that the L = 40 chain outruns the
// light cone over t ≤ 5.
RunConfig ib_config(double alpha, double temperature, int local_dim) {
  RunConfig cfg;
  cfg.epsilon0 = 0.0;
  cfg.delta = 1.0;
  cfg.initial_state = "plus_x";
  BathConfig bath;
  bath.alpha = alpha;
  bath.omega_c = 5.0;
  bath.temperature = temperature;
  bath.domain_max = 30.0;
  cfg.baths = {bath};
  cfg.chain_length = 40;
  cfg.local_dim = local_dim;
  cfg.local_dim_min = local_dim;
  cfg.taper_sites = 0;
  cfg.max_bond = 48;
  cfg.svd_cutoff = 1e-10;
  cfg.dt = 0.002;
  cfg.t_max = 5.0;
  cfg.sample_stride = 50;
  cfg.n_max = 2;
  cfg.write_csv = false;
  cfg.write_svg = false;
  return cfg;
}

struct IbRunStats {
  double max_rel_mean = 0.0;  // vs closed form, t in [0.2, 5]
  double max_rel_var = 0.0;   // vs quadrature, t in [0.2, 5]
  double t5_mean = 0.0;
  double t5_var = 0.0;
};

IbRunStats ib_run_stats(const RunArtifacts& art, double alpha, double beta) {
  IbRunStats s;
  const MomentSeries& ms = art.bath_moments[0];
  const CumulantSeries& cs = art.bath_cumulants[0];
  for (std::size_t i = 0; i < ms.times.size(); ++i) {
    const double t = ms.times[i];
    if (t < 0.2 - 1e-9) continue;
    const double mean_ref = oracle::ib_mean(alpha, 5.0, t);
    const double var_ref = oracle::ib_variance(alpha, 5.0, beta, t);
    s.max_rel_mean = std::max(s.max_rel_mean, std::abs(cs.cumulants[i][0] - mean_ref) / mean_ref);
    s.max_rel_var = std::max(s.max_rel_var, std::abs(cs.cumulants[i][1] - var_ref) / var_ref);
    if (std::abs(t - 5.0) < 1e-9) {
      s.t5_mean = cs.cumulants[i][0];
      s.t5_var = cs.cumulants[i][1];
    }
  }
  return s;
}

}  // namespace

CriterionResult ib_mean_criterion() {
  const RunArtifacts art = execute_run(ib_config(0.1, 0.0, 10));
  const IbRunStats s = ib_run_stats(art, 0.1, beta_infinity);
  const double t5_target = 0.1 * 5.0;  // α ω_C
  const double t5_err = std::abs(s.t5_mean - t5_target) / t5_target;
  CriterionResult r;
  r.id = "1 independent-boson mean";
  r.pass = s.max_rel_mean <= 0.02 && t5_err <= 0.03;
  r.detail = "max rel err " + fmt(100 * s.max_rel_mean) + "% (tol 2%), t=5 err " +
             fmt(100 * t5_err) + "% of alpha*omega_c (tol 3%)";
  return r;
}

CriterionResult ib_variance_criterion() {
  const RunArtifacts cold = execute_run(ib_config(0.1, 0.0, 10));
  const IbRunStats sc = ib_run_stats(cold, 0.1, beta_infinity);
  const RunArtifacts warm = execute_run(ib_config(0.1, 1.0, 10));
  const IbRunStats sw = ib_run_stats(warm, 0.1, 1.0);
  CriterionResult r;
  r.id = "2 independent-boson variance";
  r.pass = sc.max_rel_var <= 0.05 && sw.max_rel_var <= 0.05;
  r.detail = "max rel err T=0: " + fmt(100 * sc.max_rel_var) + "%, T=1: " +
             fmt(100 * sw.max_rel_var) + "% (tol 5%)";
  return r;
}

CriterionResult fano_alpha_independence() {
  const RunArtifacts weak = execute_run(ib_config(0.1, 0.0, 16));
  const RunArtifacts strong = execute_run(ib_config(1.5, 0.0, 16));
  const CumulantSeries& f1 = weak.bath_cumulants[0];
  const CumulantSeries& f2 = strong.bath_cumulants[0];
  double max_rel = 0.0;
  for (std::size_t i = 0; i < f1.times.size(); ++i) {
    if (f1.times[i] < 0.5 - 1e-9) continue;
    max_rel = std::max(max_rel, std::abs(f1.fano[i] - f2.fano[i]) / std::abs(f1.fano[i]));
  }
  CriterionResult r;
  r.id = "3 Fano alpha-independence";
  r.pass = max_rel <= 0.02;
  r.detail = "max pointwise rel diff " + fmt(100 * max_rel) + "% (tol 2%), t in [0.5, 5]";
  return r;
}

CriterionResult heat_operator_identity_family() {
  std::mt19937 rng(20250811);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  double worst = 0.0;
  int instances = 0;
  std::string fail_note;
  for (int i = 0; i < 24; ++i) {
    const double beta = (i % 3 == 0) ? beta_infinity : (i % 3 == 1 ? 2.0 : 1.0);
    int n_modes = std::isinf(beta) ? 3 : (beta == 2.0 ? 2 : 1 + (i / 3) % 2);

    oracle::DenseModel model;
    model.beta = beta;
    model.epsilon0 = u01(rng);
    model.delta = u01(rng);
    switch (i % 4) {
      case 0: model.spin = spin_state_named("up_z"); break;
      case 1: model.spin = spin_state_named("plus_x"); break;
      case 2: model.spin = spin_state_named("mixed"); break;
      default: model.spin = spin_state_bloch(0.3, 0.2, 0.8); break;
    }
    const double omega_lo = (!std::isinf(beta) && beta == 1.0 && n_modes == 2) ? 1.0 : 0.5;
    for (int k = 0; k < n_modes; ++k) {
      oracle::StarMode mode;
      mode.freq = omega_lo + (2.0 - omega_lo) * u01(rng);
      mode.coupling = 0.5 * u01(rng);
      model.modes.push_back(mode);
    }

    // rescale couplings until both dense paths fit under the 4096 cap
    for (int attempt = 0;; ++attempt) {
      std::size_t tpm_dim = 2, dbl_dim = 2;
      model.mode_dims.clear();
      model.dims_o.clear();
      model.dims_a.clear();
      for (const auto& mode : model.modes) {
        double n_th = 0.0, u = 1.0, v = 0.0;
        if (!std::isinf(beta)) {
          n_th = 1.0 / std::expm1(beta * mode.freq);
          u = std::sqrt(1.0 + n_th);
          v = std::sqrt(n_th);
        }
        const int d_tpm = oracle::DenseModel::thermal_dim(beta, mode.freq) +
                          oracle::DenseModel::displaced_dim(mode.coupling / mode.freq);
        model.mode_dims.push_back(d_tpm);
        model.dims_o.push_back(oracle::DenseModel::displaced_dim(u * mode.coupling / mode.freq));
        model.dims_a.push_back(oracle::DenseModel::displaced_dim(v * mode.coupling / mode.freq));
        tpm_dim *= d_tpm;
        dbl_dim *= model.dims_o.back();
        if (!std::isinf(beta)) dbl_dim *= model.dims_a.back();
      }
      if ((tpm_dim <= 4096 && dbl_dim <= 4096) || attempt > 40) break;
      for (auto& mode : model.modes) mode.coupling *= 0.85;
    }

    for (double t : {0.6, 1.1}) {
      const std::vector<double> tpm = oracle::dense_tpm_moments(model, t, 3);
      const std::vector<double> heat = oracle::dense_heat_operator_moments(model, t, 3);
      for (int n = 0; n < 3; ++n) {
        const double diff = std::abs(tpm[n] - heat[n]);
        if (diff > worst) {
          worst = diff;
          fail_note = "instance " + std::to_string(i) + " n=" + std::to_string(n + 1) +
                      " t=" + fmt(t);
        }
      }
    }
    ++instances;
  }

  CriterionResult r;
  r.id = "4 heat-operator identity (TPM equivalence)";
  r.pass = worst <= 1e-8;
  r.detail = std::to_string(instances) + " instances, worst |TPM - heat-op| = " + fmt(worst) +
             " (tol 1e-8) at " + fail_note;
  return r;
}

namespace {

// tensor path on an explicit chain layout, tight tolerances
std::vector<std::vector<double>> tensor_chain_moments(const SpinBosonParams& params,
                                                      const std::vector<BathChains>& chains,
                                                      const LayoutPlan& layout,
                                                      const Eigen::Vector2cd& spin,
                                                      const std::vector<double>& times,
                                                      int n_max) {
  const HamiltonianTrain ham = build_transformed_hamiltonian(params, chains, layout);
  const HeatOperatorSpec heat = build_heat_operator(chains, layout);
  TruncationPolicy policy;
  policy.max_bond = 64;
  policy.svd_cutoff = 1e-13;
  TensorTrainState state = initial_global_state(layout, spin);

  std::vector<std::vector<double>> out;
  const double dt = 0.001;
  double t_now = 0.0;
  for (double t : times) {
    const int steps = static_cast<int>(std::llround((t - t_now) / dt));
    for (int s = 0; s < steps; ++s) evolve_step(state, ham.op, dt, policy);
    t_now += steps * dt;
    MomentSample m = heat_moments(state, heat.per_bath[0], n_max, policy);
    out.push_back(m.moments);
  }
  return out;
}

}  // namespace

CriterionResult tensor_vs_dense_toy() {
  const std::vector<double> times{0.5, 1.0, 2.0};
  double worst = 0.0;

  // T = 0: spin + 3-site chain, local dimension 10 (dense dim 2000)
  {
    BathSpec bath = BathSpec::ohmic(0.15, 1.0, 0.0, 8.0);
    std::vector<BathChains> chains{chain_coefficients(bath, 3)};
    LocalDims dims;
    dims.chain_near = dims.chain_min = 10;
    const LayoutPlan layout = plan_layout({{3, 0}}, dims);
    SpinBosonParams params;
    params.epsilon0 = 0.8;
    params.delta = 0.5;
    params.initial_state = spin_state_named("up_z");
    const Eigen::Vector2cd spin(1.0, 0.0);

    const auto dense =
        oracle::dense_chain_heat_moments(params, chains, layout, spin, times, 2, 0);
    const auto tensor = tensor_chain_moments(params, chains, layout, spin, times, 2);
    for (std::size_t i = 0; i < times.size(); ++i)
      for (int n = 0; n < 2; ++n) worst = std::max(worst, std::abs(dense[i][n] - tensor[i][n]));
  }

  // β = 1: genuine thermofield doubling, O chain 2 sites + A chain 1 site
  {
    BathSpec bath = BathSpec::ohmic(0.12, 1.0, 1.0, 8.0);
    BathChains bc;
    bc.original = chain_coefficients(bath, 2).original;
    const ThermofieldMeasures tf = thermofield_split(bath);
    bc.auxiliary = stieltjes_recurrence(discretize_measure(tf.auxiliary, 4096), 1);
    std::vector<BathChains> chains{bc};
    LocalDims dims;
    dims.chain_near = dims.chain_min = 8;
    const LayoutPlan layout = plan_layout({{2, 1}}, dims);
    SpinBosonParams params;
    params.epsilon0 = 0.6;
    params.delta = 0.7;
    params.initial_state = spin_state_named("plus_x");
    const Eigen::Vector2cd spin(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));

    const auto dense =
        oracle::dense_chain_heat_moments(params, chains, layout, spin, times, 2, 0);
    const auto tensor = tensor_chain_moments(params, chains, layout, spin, times, 2);
    for (std::size_t i = 0; i < times.size(); ++i)
      for (int n = 0; n < 2; ++n) worst = std::max(worst, std::abs(dense[i][n] - tensor[i][n]));
  }

  CriterionResult r;
  r.id = "5 tensor-vs-dense toy";
  r.pass = worst <= 1e-6;
  r.detail = "worst |tensor - dense| = " + fmt(worst) + " (tol 1e-6) at t in {0.5, 1, 2}";
  return r;
}

CriterionResult chain_closed_forms() {
  double worst_laguerre = 0.0, worst_legendre = 0.0;

  // Ohmic T = 0, ω_C = 1: generalized-Laguerre recurrence of the weight ω e^{−ω};
  // the domain must cover the exponential tail far beyond the dynamics default
  {
    BathMeasure j;
    j.omega_max = 150.0;
    j.density = [](double w) { return 2.0 * 0.1 * w * std::exp(-w); };
    const ChainCoefficients c = stieltjes_recurrence(discretize_measure(j, 6000), 21);
    for (int n = 0; n < 20; ++n) {
      worst_laguerre = std::max(worst_laguerre, std::abs(c.site_freqs[n] - (2.0 * n + 2.0)));
      worst_laguerre = std::max(
          worst_laguerre,
          std::abs(c.hoppings[n] - std::sqrt(static_cast<double>((n + 1) * (n + 2)))));
    }
  }

  // uniform weight on [0, 1]: shifted-Legendre a_n = 1/2, b_n = n²/(4(4n²−1))
  {
    BathMeasure uni;
    uni.omega_max = 1.0;
    uni.density = [](double) { return 1.0; };
    const ChainCoefficients c = stieltjes_recurrence(discretize_measure(uni, 6000), 21);
    for (int n = 0; n < 20; ++n) {
      worst_legendre = std::max(worst_legendre, std::abs(c.site_freqs[n] - 0.5) / 0.5);
      const double bn1 = static_cast<double>((n + 1) * (n + 1)) /
                         (4.0 * (4.0 * (n + 1) * (n + 1) - 1.0));
      worst_legendre =
          std::max(worst_legendre, std::abs(c.hoppings[n] - std::sqrt(bn1)) / std::sqrt(bn1));
    }
  }

  CriterionResult r;
  r.id = "6 chain coefficient closed forms";
  r.pass = worst_laguerre <= 1e-8 && worst_legendre <= 1e-8;
  r.detail = "Laguerre max abs err " + fmt(worst_laguerre) + " (tol 1e-8), Legendre max rel err " +
             fmt(worst_legendre) + " (tol 1e-8), first 20 coefficients";
  return r;
}

CriterionResult convergence_gates() {
  const RunArtifacts base = execute_run(ib_config(0.1, 0.0, 10));
  const IbRunStats sb = ib_run_stats(base, 0.1, beta_infinity);

  RunConfig cfg_d = ib_config(0.1, 0.0, 20);
  RunConfig cfg_bond = ib_config(0.1, 0.0, 10);
  cfg_bond.max_bond = 96;
  RunConfig cfg_dt = ib_config(0.1, 0.0, 10);
  cfg_dt.dt = 0.001;
  cfg_dt.sample_stride = 100;

  double worst = 0.0;
  std::string which;
  for (const auto& [name, cfg] : std::vector<std::pair<std::string, RunConfig>>{
           {"double d", cfg_d}, {"double D", cfg_bond}, {"halve dt", cfg_dt}}) {
    const IbRunStats s = ib_run_stats(execute_run(cfg), 0.1, beta_infinity);
    const double dm = std::abs(s.t5_mean - sb.t5_mean) / std::abs(sb.t5_mean);
    const double dv = std::abs(s.t5_var - sb.t5_var) / std::abs(sb.t5_var);
    if (std::max(dm, dv) > worst) {
      worst = std::max(dm, dv);
      which = name;
    }
  }

  CriterionResult r;
  r.id = "7 convergence gates";
  r.pass = worst < 0.01;
  r.detail = "largest t=5 mean/variance shift " + fmt(100 * worst) + "% (" + which +
             ", tol 1%)";
  return r;
}

CriterionResult nonequilibrium_properties() {
  std::ostringstream detail;
  bool pass = true;

  auto two_bath_config = [](double a1, double t1, double a2, double t2) {
    RunConfig cfg;
    cfg.epsilon0 = 1.0;
    cfg.delta = 0.0;
    cfg.initial_state = "up_z";
    BathConfig b1, b2;
    b1.alpha = a1;
    b1.omega_c = 5.0;
    b1.temperature = t1;
    b1.domain_max = 30.0;
    b2.alpha = a2;
    b2.omega_c = 5.0;
    b2.temperature = t2;
    b2.domain_max = 30.0;
    cfg.baths = {b1, b2};
    cfg.chain_length = 10;
    cfg.local_dim = 6;
    cfg.local_dim_min = 4;
    cfg.taper_sites = 4;
    cfg.max_bond = 28;
    cfg.svd_cutoff = 1e-9;
    cfg.dt = 0.01;
    cfg.t_max = 1.6;
    cfg.sample_stride = 20;
    cfg.n_max = 2;
    cfg.write_csv = false;
    cfg.write_svg = false;
    return cfg;
  };

  // (a) symmetric run: exchange symmetry kills the mean current
  {
    RunConfig cfg = two_bath_config(0.2, 1.0, 0.2, 1.0);
    cfg.initial_state = "mixed";
    const RunArtifacts art = execute_run(cfg);
    const double scale = 0.2 * 5.0;
    const std::size_t last = art.current->times.size() - 1;
    const double mean_current = art.current->scaled[last][0];
    const bool ok = std::abs(mean_current) < 0.05 * scale;
    pass = pass && ok;
    detail << "(a) |J| = " << fmt(std::abs(mean_current)) << " vs 5% of alpha*omega_c = "
           << fmt(0.05 * scale) << (ok ? " ok" : " FAIL") << "; ";

    // (b) linearity of Δ̃_Q and (c) current variance on the same run
    double worst_lin = 0.0, min_var = 0.0, var_floor = 0.0;
    for (std::size_t i = 0; i < art.delta_moments->times.size(); ++i) {
      const double lhs = art.delta_moments->moments[i][0];
      const double rhs = art.bath_moments[1].moments[i][0] - art.bath_moments[0].moments[i][0];
      worst_lin = std::max(worst_lin, std::abs(lhs - rhs));
    }
    for (std::size_t i = 0; i < art.current->times.size(); ++i) {
      if (art.current->cumulants[i][1] < min_var) {
        min_var = art.current->cumulants[i][1];
        const double mean = art.current->cumulants[i][0];
        var_floor = -1e-9 * std::max(1.0, mean * mean);
      }
    }
    const bool ok_b = worst_lin <= 1e-10;
    const bool ok_c = min_var >= var_floor;
    pass = pass && ok_b && ok_c;
    detail << "(b) max |<delta> - (<Q2>-<Q1>)| = " << fmt(worst_lin) << (ok_b ? " ok" : " FAIL")
           << "; (c) min current variance = " << fmt(min_var) << (ok_c ? " ok" : " FAIL")
           << "; ";
  }

  // (d) rectification signature under coupling exchange
  {
    const RunArtifacts fwd = execute_run(two_bath_config(0.05, 1.0, 0.5, 0.0));
    const RunArtifacts rev = execute_run(two_bath_config(0.5, 1.0, 0.05, 0.0));
    const double j_fwd = fwd.current->scaled[fwd.current->times.size() - 1][0];
    const double j_rev = rev.current->scaled[rev.current->times.size() - 1][0];
    const double ratio = std::abs(j_fwd) / std::max(std::abs(j_rev), 1e-300);
    const bool ok = ratio > 2.0;
    pass = pass && ok;
    detail << "(d) |J(a2>a1)|/|J(a1>a2)| = " << fmt(ratio) << " (require > 2)"
           << (ok ? " ok" : " FAIL");
  }

  CriterionResult r;
  r.id = "8 nonequilibrium properties";
  r.pass = pass;
  r.detail = detail.str();
  return r;
}

CriterionResult zero_coupling_null() {
  RunConfig cfg = ib_config(0.0, 0.0, 6);
  cfg.epsilon0 = 1.0;
  cfg.delta = 1.0;
  cfg.chain_length = 8;
  cfg.dt = 0.005;
  cfg.t_max = 2.0;
  cfg.sample_stride = 40;
  // a zero measure leaves no chain to build; couple an explicitly zero-strength bath
  cfg.baths[0].alpha = 0.0;
  cfg.baths[0].omega_c = 5.0;
  const RunArtifacts art = execute_run(cfg);
  double worst = 0.0;
  for (const auto& row : art.bath_moments[0].moments)
    for (double v : row) worst = std::max(worst, std::abs(v));
  CriterionResult r;
  r.id = "9 zero-coupling null";
  r.pass = worst < 1e-10;
  r.detail = "largest |moment| = " + fmt(worst) + " (tol 1e-10)";
  return r;
}

std::vector<CriterionResult> run_scope(const std::string& scope) {
  std::vector<CriterionResult> out;
  const bool all = scope == "all";
  if (all || scope == "oracle") out.push_back(heat_operator_identity_family());
  if (all || scope == "chain") out.push_back(chain_closed_forms());
  if (all || scope == "engine") {
    out.push_back(tensor_vs_dense_toy());
    out.push_back(zero_coupling_null());
  }
  if (all) {
    out.push_back(ib_mean_criterion());
    out.push_back(ib_variance_criterion());
    out.push_back(fano_alpha_independence());
    out.push_back(convergence_gates());
    out.push_back(nonequilibrium_properties());
  }
  if (out.empty()) throw domain_error("unknown verify scope '" + scope + "'");
  return out;
}

}  // namespace qhf::verify
