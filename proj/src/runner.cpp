#include "qhf/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "qhf/checkpoint.hpp"
#include "qhf/oracles.hpp"

namespace qhf {

namespace {

std::vector<SpinBranch> parse_initial_state(const std::string& text) {
  std::istringstream ss(text);
  std::string head;
  ss >> head;
  if (head == "bloch") {
    double x, y, z;
    if (!(ss >> x >> y >> z)) throw config_error("initial_state bloch needs three components");
    return spin_state_bloch(x, y, z);
  }
  return spin_state_named(head);
}

BathSpec make_bath_spec(const BathConfig& cfg) {
  if (!cfg.table.empty()) {
    BathSpec b;
    b.spectral = SpectralDensity::from_file(cfg.table, cfg.domain_max);
    b.beta = cfg.temperature == 0.0 ? beta_infinity : 1.0 / cfg.temperature;
    return b;
  }
  return BathSpec::ohmic(cfg.alpha, cfg.omega_c, cfg.temperature, cfg.domain_max);
}

double bath_heat_scale(const BathConfig& cfg, const BathChains& chains) {
  if (cfg.table.empty()) return cfg.alpha * cfg.omega_c;
  // tabulated: c0² ≈ ∫dμ_O; divide by twice the mean frequency as an Ohmic-like proxy
  const ChainCoefficients& c = chains.original;
  const double mean_freq = c.site_freqs.empty() ? 1.0 : c.site_freqs[0];
  return c.c0 * c.c0 / std::max(2.0 * mean_freq, 1e-12);
}

struct BranchSeed {
  double weight;
  Eigen::Vector2cd spin;
};

struct PartialRow {
  int series;
  double time;
  std::vector<double> moments;
  double discarded;
};

void append_partial(const std::string& path, int series, const EvolutionSample& s,
                    const MomentSample& m) {
  std::ofstream out(path, std::ios::app);
  out.precision(17);
  out << series << " " << s.step << " " << s.time;
  for (double v : m.moments) out << " " << v;
  out << " " << s.truncation_budget + m.discarded_weight << " " << (m.warning ? 1 : 0) << "\n";
}

std::vector<PartialRow> read_partial(const std::string& path, int n_max, int max_step) {
  std::vector<PartialRow> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    PartialRow r;
    int step, warn;
    if (!(ss >> r.series >> step >> r.time)) continue;
    if (step > max_step) continue;
    r.moments.resize(n_max);
    for (int n = 0; n < n_max; ++n) ss >> r.moments[n];
    ss >> r.discarded >> warn;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

int thread_pool_size() {
  if (const char* env = std::getenv("QHF_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(4u, hw == 0 ? 1u : hw));
}

RunArtifacts execute_run(RunConfig cfg, const std::string& resume_dir) {
  cfg.validate();
  cfg.resolve_time_defaults();

  RunArtifacts art;

  std::vector<BathSpec> baths;
  for (const BathConfig& bc : cfg.baths) baths.push_back(make_bath_spec(bc));

  // chain length: default from the light-cone bound 2·max(t_n)·t_max < L
  int length = cfg.chain_length;
  if (length == 0) {
    double max_hop = 0.0;
    for (const BathSpec& b : baths) {
      const BathChains probe = chain_coefficients(b, 48, cfg.quad_nodes);
      max_hop = std::max(max_hop, probe.original.max_hopping());
      if (probe.auxiliary) max_hop = std::max(max_hop, probe.auxiliary->max_hopping());
    }
    length = static_cast<int>(std::ceil(2.0 * max_hop * cfg.t_max)) + 4;
    art.notes.push_back("chain_length auto-selected: L = " + std::to_string(length));
  }
  cfg.chain_length = length;

  std::vector<BathChains> chains;
  std::vector<ChainLengths> lengths;
  for (BathSpec b : baths) {
    // α = 0 leaves an identically zero measure; run the same chain decoupled
    // (c0 = 0) so the null model still exercises the full pipeline
    const bool decoupled =
        b.spectral.kind == SpectralDensity::Kind::ohmic && b.spectral.alpha == 0.0;
    if (decoupled) b.spectral.alpha = 1.0;
    chains.push_back(chain_coefficients(b, length, cfg.quad_nodes));
    if (decoupled) {
      chains.back().original.c0 = 0.0;
      if (chains.back().auxiliary) chains.back().auxiliary->c0 = 0.0;
    }
    ChainLengths cl;
    cl.original = length;
    cl.auxiliary = chains.back().auxiliary ? length : 0;
    lengths.push_back(cl);
    double max_hop = chains.back().original.max_hopping();
    if (chains.back().auxiliary)
      max_hop = std::max(max_hop, chains.back().auxiliary->max_hopping());
    if (2.0 * max_hop * cfg.t_max > length) {
      std::ostringstream w;
      w << "light-cone bound violated: 2*max(t_n)*t_max = " << 2.0 * max_hop * cfg.t_max
        << " exceeds L = " << length << "; fast-mode reflections may reach the system";
      art.notes.push_back(w.str());
    }
  }

  LocalDims dims;
  dims.chain_near = cfg.local_dim;
  dims.chain_min = cfg.local_dim_min;
  dims.taper_sites = cfg.taper_sites;
  const LayoutPlan layout = plan_layout(lengths, dims);

  SpinBosonParams params;
  params.epsilon0 = cfg.epsilon0;
  params.delta = cfg.delta;
  params.initial_state = parse_initial_state(cfg.initial_state);
  params.validate();

  const HamiltonianTrain ham = build_transformed_hamiltonian(params, chains, layout);
  const HeatOperatorSpec heat = build_heat_operator(chains, layout);
  art.term_dump = ham.dump_terms();

  std::vector<const OperatorTrain*> ops;
  for (const OperatorTrain& q : heat.per_bath) ops.push_back(&q);
  if (heat.delta) ops.push_back(&*heat.delta);

  TruncationPolicy policy;
  policy.max_bond = cfg.max_bond;
  policy.svd_cutoff = cfg.svd_cutoff;
  policy.local_dim = cfg.local_dim;

  EvolutionSchedule schedule;
  schedule.t_max = cfg.t_max;
  schedule.dt = cfg.dt;
  schedule.sample_stride = cfg.sample_stride;

  std::vector<BranchSeed> branches;
  for (const SpinBranch& b : params.initial_state) branches.push_back({b.weight, b.state});

  const bool checkpointing = cfg.checkpoints && branches.size() == 1;
  if (cfg.checkpoints && branches.size() > 1)
    art.notes.push_back("checkpoints disabled: mixed initial state runs multiple branches");
  const std::string ckpt_path = cfg.out_dir + "/checkpoint.qtt";
  const std::string partial_path = cfg.out_dir + "/partial.tsv";

  // resume bookkeeping
  int start_step = 0;
  TensorTrainState resumed_state;
  std::vector<PartialRow> prior_rows;
  if (!resume_dir.empty()) {
    std::map<std::string, std::string> mf;
    resumed_state = load_state(resume_dir + "/checkpoint.qtt", &mf);
    start_step = std::stoi(mf.at("step"));
    prior_rows = read_partial(resume_dir + "/partial.tsv", cfg.n_max, start_step);
    if (branches.size() != 1) throw config_error("resume requires a pure initial state");
    art.notes.push_back("resumed from step " + std::to_string(start_step));
  }

  if (checkpointing) std::filesystem::create_directories(cfg.out_dir);

  auto run_branch = [&](const BranchSeed& seed, bool primary) {
    HeatRunResult result;
    result.series.resize(ops.size());
    for (auto& s : result.series) s.n_max = cfg.n_max;

    TensorTrainState state =
        start_step > 0 ? resumed_state : initial_global_state(layout, seed.spin);
    EvolutionSchedule sched = schedule;

    // replay rows computed before the resume point
    if (start_step > 0) {
      for (const PartialRow& r : prior_rows) {
        MomentSeries& s = result.series[r.series];
        s.times.push_back(r.time);
        s.moments.push_back(r.moments);
        s.discarded_weight.push_back(r.discarded);
      }
    }

    const int steps = sched.total_steps();
    int step = start_step;
    while (step <= steps) {
      if (step > start_step || start_step == 0) {
        EvolutionSample sample;
        sample.step = step;
        sample.time = step * sched.dt;
        sample.state_norm = norm(state);
        sample.energy =
            std::real(expectation(state, ham.op)) / (sample.state_norm * sample.state_norm);
        sample.truncation_budget = state.truncation_budget;
        if (primary) result.samples.push_back(sample);
        for (std::size_t k = 0; k < ops.size(); ++k) {
          MomentSample m = heat_moments(state, *ops[k], cfg.n_max, policy);
          MomentSeries& series = result.series[k];
          series.times.push_back(sample.time);
          series.moments.push_back(m.moments);
          series.discarded_weight.push_back(sample.truncation_budget + m.discarded_weight);
          series.warning = series.warning || m.warning;
          result.compression_warning |= m.warning;
          if (checkpointing && primary) append_partial(partial_path, static_cast<int>(k), sample, m);
        }
        if (checkpointing && primary)
          save_state(ckpt_path, state,
                     {{"step", std::to_string(step)},
                      {"time", std::to_string(sample.time)},
                      {"max_bond", std::to_string(policy.max_bond)},
                      {"svd_cutoff", std::to_string(policy.svd_cutoff)},
                      {"local_dim", std::to_string(policy.local_dim)}});
      }
      if (step == steps) break;
      const int next_sample = std::min(steps, (step / sched.sample_stride + 1) * sched.sample_stride);
      while (step < next_sample) {
        try {
          evolve_step(state, ham.op, sched.dt, policy);
        } catch (const numerics_error& e) {
          throw numerics_error(std::string(e.what()) + "; last good time t = " +
                               std::to_string(step * sched.dt));
        }
        ++step;
      }
    }
    result.compression_warning |= state.compression_warning;
    return result;
  };

  // branch runs are independent; combine in fixed order for determinism
  std::vector<HeatRunResult> branch_results(branches.size());
  const int pool = thread_pool_size();
  for (std::size_t base = 0; base < branches.size(); base += pool) {
    std::vector<std::future<HeatRunResult>> futs;
    for (std::size_t i = base; i < std::min(branches.size(), base + pool); ++i)
      futs.push_back(std::async(std::launch::async, run_branch, branches[i], i == 0));
    for (std::size_t i = base; i < std::min(branches.size(), base + pool); ++i)
      branch_results[i] = futs[i - base].get();
  }

  double heat_scale = 0.0;
  for (std::size_t b = 0; b < cfg.baths.size(); ++b)
    heat_scale = std::max(heat_scale, bath_heat_scale(cfg.baths[b], chains[b]));
  const double fano_floor = 1e-8 * heat_scale;

  for (std::size_t k = 0; k < ops.size(); ++k) {
    std::vector<std::pair<double, MomentSeries>> weighted;
    for (std::size_t i = 0; i < branches.size(); ++i)
      weighted.emplace_back(branches[i].weight, branch_results[i].series[k]);
    MomentSeries combined = mixed_state_combine(weighted);
    if (k < heat.per_bath.size()) {
      art.bath_cumulants.push_back(cumulants_from_moments(combined, fano_floor));
      art.bath_moments.push_back(std::move(combined));
    } else {
      art.current = current_statistics(combined, fano_floor);
      art.delta_moments = std::move(combined);
    }
  }
  art.samples = std::move(branch_results[0].samples);
  for (const HeatRunResult& r : branch_results) art.compression_warning |= r.compression_warning;
  art.resolved = cfg;
  return art;
}

void write_artifacts(const RunArtifacts& art) {
  const RunConfig& cfg = art.resolved;
  std::filesystem::create_directories(cfg.out_dir);
  const bool two_bath = art.bath_moments.size() == 2;

  if (cfg.write_csv) {
    if (!two_bath) {
      write_series_csv(cfg.out_dir + "/results.csv", art.bath_moments[0], art.bath_cumulants[0],
                       false);
    } else {
      write_series_csv(cfg.out_dir + "/bath1_heat.csv", art.bath_moments[0],
                       art.bath_cumulants[0], false);
      write_series_csv(cfg.out_dir + "/bath2_heat.csv", art.bath_moments[1],
                       art.bath_cumulants[1], false);
      write_series_csv(cfg.out_dir + "/results.csv", *art.delta_moments, *art.current, true);
    }
  }

  if (cfg.write_svg) {
    auto series_of = [](const MomentSeries& ms, const CumulantSeries& cs, int what,
                        const std::string& label) {
      PlotSeries p;
      p.label = label;
      p.x = cs.times;
      for (std::size_t i = 0; i < cs.times.size(); ++i) {
        if (what == 0) p.y.push_back(cs.cumulants[i][0]);
        if (what == 1) p.y.push_back(cs.cumulants[i].size() > 1 ? cs.cumulants[i][1] : 0.0);
        if (what == 2) p.y.push_back(cs.fano[i]);
      }
      (void)ms;
      return p;
    };
    if (!two_bath) {
      const auto& ms = art.bath_moments[0];
      const auto& cs = art.bath_cumulants[0];
      write_svg_chart(cfg.out_dir + "/mean.svg", "mean heat", "t", "&#9001;Q&#9002;",
                      {series_of(ms, cs, 0, "bath 1")});
      write_svg_chart(cfg.out_dir + "/variance.svg", "heat variance", "t", "var Q",
                      {series_of(ms, cs, 1, "bath 1")});
      write_svg_chart(cfg.out_dir + "/fano.svg", "heat Fano factor", "t", "F",
                      {series_of(ms, cs, 2, "bath 1")});
    } else {
      write_svg_chart(cfg.out_dir + "/mean.svg", "mean heat per bath", "t", "&#9001;Q&#9002;",
                      {series_of(art.bath_moments[0], art.bath_cumulants[0], 0, "bath 1"),
                       series_of(art.bath_moments[1], art.bath_cumulants[1], 0, "bath 2")});
      PlotSeries jmean, jfano;
      jmean.label = "current";
      jfano.label = "current";
      jmean.x = art.current->times;
      jfano.x = art.current->times;
      for (std::size_t i = 0; i < art.current->times.size(); ++i) {
        jmean.y.push_back(art.current->scaled[i][0]);
        jfano.y.push_back(art.current->fano[i]);
      }
      write_svg_chart(cfg.out_dir + "/current_mean.svg", "mean heat current", "t", "&#9001;J&#9002;",
                      {jmean});
      write_svg_chart(cfg.out_dir + "/current_fano.svg", "current Fano factor", "t", "F",
                      {jfano});
    }
  }

  std::ofstream mf(cfg.out_dir + "/manifest.txt");
  if (!mf) throw numerics_error("cannot write manifest");
  mf << cfg.to_config_text();
  mf << "\n[run]\n";
  mf << "version = qhf 1.0.0\n";
  mf << "compression_warning = " << (art.compression_warning ? "true" : "false") << "\n";
  double max_budget = 0.0;
  for (const auto& ms : art.bath_moments)
    for (double w : ms.discarded_weight) max_budget = std::max(max_budget, w);
  mf << "max_discarded_weight = " << max_budget << "\n";
  int note_idx = 0;
  for (const std::string& n : art.notes) mf << "note" << note_idx++ << " = " << n << "\n";
}

}  // namespace qhf
