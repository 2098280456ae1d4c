#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "qhf/oracles.hpp"
#include "qhf/runner.hpp"
#include "qhf/verify.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerics = 3;
constexpr int exit_strict = 4;

int do_run(const std::string& config_path, const std::string& out_override, bool strict,
           bool dump_terms, const std::string& resume_dir) {
  qhf::RunConfig cfg = qhf::RunConfig::from_file(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (strict) cfg.strict = true;

  qhf::RunArtifacts art = qhf::execute_run(cfg, resume_dir);
  for (const std::string& note : art.notes) std::cerr << "note: " << note << "\n";
  if (dump_terms) std::cout << art.term_dump;
  qhf::write_artifacts(art);
  std::cout << "wrote " << art.resolved.out_dir << "/results.csv and manifest.txt\n";

  if (art.resolved.strict && art.compression_warning) {
    std::cerr << "strict mode: compression warnings escalated (bond cap reached with "
                 "discarded weight far above the cutoff)\n";
    return exit_strict;
  }
  return exit_ok;
}

int do_sweep(const std::vector<std::string>& configs) {
  const int pool = qhf::thread_pool_size();
  int status = exit_ok;
  for (std::size_t base = 0; base < configs.size(); base += pool) {
    std::vector<std::future<int>> futs;
    for (std::size_t i = base; i < std::min(configs.size(), base + pool); ++i) {
      futs.push_back(std::async(std::launch::async, [&, i] {
        try {
          return do_run(configs[i], "", false, false, "");
        } catch (const qhf::config_error& e) {
          std::cerr << configs[i] << ": config error: " << e.what() << "\n";
          return exit_config;
        } catch (const std::exception& e) {
          std::cerr << configs[i] << ": " << e.what() << "\n";
          return exit_numerics;
        }
      }));
    }
    for (auto& f : futs) status = std::max(status, f.get());
  }
  return status;
}

int do_chain(double alpha, double omega_c, double temperature, int length,
             const std::string& prefix, double domain_max, int nodes, const std::string& table) {
  qhf::BathSpec bath;
  if (!table.empty()) {
    bath.spectral = qhf::SpectralDensity::from_file(table, domain_max);
    bath.beta = temperature == 0.0 ? qhf::beta_infinity : 1.0 / temperature;
  } else {
    bath = qhf::BathSpec::ohmic(alpha, omega_c, temperature, domain_max);
  }
  const qhf::BathChains chains = qhf::chain_coefficients(bath, length, nodes);
  {
    std::ofstream out(prefix + "_O.txt");
    out << chains.original.to_table();
    std::cout << "wrote " << prefix << "_O.txt\n";
  }
  if (chains.auxiliary) {
    std::ofstream out(prefix + "_A.txt");
    out << chains.auxiliary->to_table();
    std::cout << "wrote " << prefix << "_A.txt\n";
  }
  return exit_ok;
}

int do_oracle(double alpha, double omega_c, double temperature, double t_max, int samples,
              const std::string& out_path) {
  const double beta = temperature == 0.0 ? qhf::beta_infinity : 1.0 / temperature;
  qhf::MomentSeries ms;
  ms.n_max = 2;
  for (int i = 0; i <= samples; ++i) {
    const double t = t_max * i / samples;
    const double mean = qhf::oracle::ib_mean(alpha, omega_c, t);
    const double var = qhf::oracle::ib_variance(alpha, omega_c, beta, t);
    ms.times.push_back(t);
    ms.moments.push_back({mean, var + mean * mean});
    ms.discarded_weight.push_back(0.0);
  }
  const qhf::CumulantSeries cs = qhf::cumulants_from_moments(ms, 1e-8 * alpha * omega_c);
  qhf::write_series_csv(out_path, ms, cs, false);
  std::cout << "wrote " << out_path << "\n";
  return exit_ok;
}

int do_verify(const std::string& scope) {
  const auto results = qhf::verify::run_scope(scope);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ": " << r.detail << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? exit_ok : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qhf - heat statistics of strongly coupled spin-boson models"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a run config, write CSV/SVG/manifest");
  std::string config_path, out_override, resume_dir;
  bool strict = false, dump_terms = false;
  run->add_option("config", config_path, "run config file")->required();
  run->add_option("--out", out_override, "override the output directory");
  run->add_flag("--strict", strict, "escalate compression warnings to exit code 4");
  run->add_flag("--dump-terms", dump_terms, "print every Hamiltonian term with provenance");
  run->add_option("--resume", resume_dir, "continue from a checkpoint directory");

  auto* sweep = app.add_subcommand("sweep", "run several configs on a bounded worker pool");
  std::vector<std::string> sweep_configs;
  sweep->add_option("configs", sweep_configs, "config files")->required();

  auto* chain = app.add_subcommand("chain", "write chain coefficient tables for one bath");
  double alpha = 0.1, omega_c = 1.0, temperature = 0.0, domain_max = 0.0;
  int length = 20, nodes = 0;
  std::string prefix = "chain", table;
  chain->add_option("--alpha", alpha, "Ohmic coupling");
  chain->add_option("--omega-c", omega_c, "Ohmic cutoff frequency");
  chain->add_option("--temperature", temperature, "bath temperature (0 = ground state)");
  chain->add_option("--length", length, "chain length");
  chain->add_option("--out", prefix, "output file prefix");
  chain->add_option("--domain-max", domain_max, "hard frequency cutoff");
  chain->add_option("--nodes", nodes, "quadrature node count");
  chain->add_option("--table", table, "tabulated spectral density file");

  auto* oracle_cmd = app.add_subcommand("oracle", "closed-form independent-boson reference CSV");
  double o_alpha = 0.1, o_wc = 5.0, o_temp = 0.0, o_tmax = 5.0;
  int o_samples = 50;
  std::string o_out = "oracle_ib.csv";
  oracle_cmd->add_option("--alpha", o_alpha, "Ohmic coupling");
  oracle_cmd->add_option("--omega-c", o_wc, "Ohmic cutoff frequency");
  oracle_cmd->add_option("--temperature", o_temp, "bath temperature");
  oracle_cmd->add_option("--t-max", o_tmax, "final time");
  oracle_cmd->add_option("--samples", o_samples, "number of samples");
  oracle_cmd->add_option("--out", o_out, "output CSV path");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  std::string scope = "all";
  verify->add_option("--scope", scope, "oracle | chain | engine | all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(config_path, out_override, strict, dump_terms, resume_dir);
    if (*sweep) return do_sweep(sweep_configs);
    if (*chain) return do_chain(alpha, omega_c, temperature, length, prefix, domain_max, nodes, table);
    if (*oracle_cmd) return do_oracle(o_alpha, o_wc, o_temp, o_tmax, o_samples, o_out);
    if (*verify) return do_verify(scope);
  } catch (const qhf::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const qhf::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const qhf::numerics_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerics;
  }
  return exit_ok;
}
