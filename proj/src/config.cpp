#include "qhf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qhf {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw config_error("expected a number, got '" + v + "'", line);
  }
}

int parse_int(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw config_error("expected an integer, got '" + v + "'", line);
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error("expected a boolean, got '" + v + "'", line);
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  return from_stream(in, path);
}

RunConfig RunConfig::from_stream(std::istream& in, const std::string& name) {
  RunConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  BathConfig* bath = nullptr;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw config_error("unterminated section header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (section == "bath") {
        cfg.baths.emplace_back();
        bath = &cfg.baths.back();
      } else if (section != "model" && section != "numerics" && section != "output" &&
                 section != "run") {
        throw config_error("unknown section [" + section + "]", lineno);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("expected key = value", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty()) throw config_error("key '" + key + "' outside any section", lineno);

    if (section == "model") {
      if (key == "epsilon0") cfg.epsilon0 = parse_double(val, lineno);
      else if (key == "delta") cfg.delta = parse_double(val, lineno);
      else if (key == "initial_state") cfg.initial_state = val;
      else throw config_error("unknown [model] key '" + key + "'", lineno);
    } else if (section == "bath") {
      if (key == "alpha") bath->alpha = parse_double(val, lineno);
      else if (key == "omega_c") bath->omega_c = parse_double(val, lineno);
      else if (key == "temperature" || key == "T") bath->temperature = parse_double(val, lineno);
      else if (key == "table") bath->table = val;
      else if (key == "domain_max") bath->domain_max = parse_double(val, lineno);
      else throw config_error("unknown [bath] key '" + key + "'", lineno);
    } else if (section == "numerics") {
      if (key == "chain_length") cfg.chain_length = parse_int(val, lineno);
      else if (key == "local_dim") cfg.local_dim = parse_int(val, lineno);
      else if (key == "local_dim_min") cfg.local_dim_min = parse_int(val, lineno);
      else if (key == "taper_sites") cfg.taper_sites = parse_int(val, lineno);
      else if (key == "max_bond") cfg.max_bond = parse_int(val, lineno);
      else if (key == "svd_cutoff") cfg.svd_cutoff = parse_double(val, lineno);
      else if (key == "dt") cfg.dt = parse_double(val, lineno);
      else if (key == "t_max") cfg.t_max = parse_double(val, lineno);
      else if (key == "sample_stride") cfg.sample_stride = parse_int(val, lineno);
      else if (key == "n_max") cfg.n_max = parse_int(val, lineno);
      else if (key == "quad_nodes") cfg.quad_nodes = parse_int(val, lineno);
      else if (key == "seed") cfg.seed = static_cast<unsigned>(parse_int(val, lineno));
      else throw config_error("unknown [numerics] key '" + key + "'", lineno);
    } else if (section == "output") {
      if (key == "directory") cfg.out_dir = val;
      else if (key == "formats") {
        cfg.write_csv = val.find("csv") != std::string::npos;
        cfg.write_svg = val.find("svg") != std::string::npos;
        if (!cfg.write_csv && !cfg.write_svg)
          throw config_error("formats must mention csv and/or svg", lineno);
      } else if (key == "strict") cfg.strict = parse_bool(val, lineno);
      else if (key == "checkpoints") cfg.checkpoints = parse_bool(val, lineno);
      else throw config_error("unknown [output] key '" + key + "'", lineno);
    }
    // [run] section of manifests is informational; ignored on input
  }
  (void)name;
  return cfg;
}

void RunConfig::validate() const {
  if (baths.empty()) throw config_error("config declares no [bath] section");
  if (baths.size() > 2) throw config_error("at most two baths are supported");
  for (std::size_t i = 0; i < baths.size(); ++i) {
    const BathConfig& b = baths[i];
    if (b.table.empty()) {
      if (b.omega_c <= 0.0)
        throw config_error("bath " + std::to_string(i + 1) + ": omega_c must be positive");
      if (b.alpha < 0.0)
        throw config_error("bath " + std::to_string(i + 1) + ": alpha must be non-negative");
    }
    if (b.temperature < 0.0)
      throw config_error("bath " + std::to_string(i + 1) + ": temperature must be non-negative");
  }
  if (t_max <= 0.0) throw config_error("t_max must be positive");
  if (dt < 0.0) throw config_error("dt must be non-negative");
  if (n_max < 1 || n_max > 4) throw config_error("n_max must be in 1..4");
  if (local_dim < 2) throw config_error("local_dim must be >= 2");
  if (local_dim_min < 2 || local_dim_min > local_dim)
    throw config_error("local_dim_min must be in [2, local_dim]");
  if (max_bond < 1) throw config_error("max_bond must be >= 1");
  if (svd_cutoff < 0.0 || svd_cutoff >= 1.0) throw config_error("svd_cutoff must be in [0, 1)");
  if (chain_length < 0) throw config_error("chain_length must be >= 0");
}

void RunConfig::resolve_time_defaults() {
  if (dt == 0.0) {
    double scale = epsilon0;
    for (const BathConfig& b : baths) scale = std::max(scale, b.omega_c);
    if (scale <= 0.0) scale = 1.0;
    dt = 0.01 / scale;
  }
  if (sample_stride == 0)
    sample_stride = std::max(1, static_cast<int>(std::llround(0.1 / dt)));
}

std::string RunConfig::to_config_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[model]\n";
  os << "epsilon0 = " << epsilon0 << "\n";
  os << "delta = " << delta << "\n";
  os << "initial_state = " << initial_state << "\n";
  for (const BathConfig& b : baths) {
    os << "\n[bath]\n";
    if (!b.table.empty()) os << "table = " << b.table << "\n";
    else {
      os << "alpha = " << b.alpha << "\n";
      os << "omega_c = " << b.omega_c << "\n";
    }
    os << "temperature = " << b.temperature << "\n";
    if (b.domain_max > 0.0) os << "domain_max = " << b.domain_max << "\n";
  }
  os << "\n[numerics]\n";
  os << "chain_length = " << chain_length << "\n";
  os << "local_dim = " << local_dim << "\n";
  os << "local_dim_min = " << local_dim_min << "\n";
  os << "taper_sites = " << taper_sites << "\n";
  os << "max_bond = " << max_bond << "\n";
  os << "svd_cutoff = " << svd_cutoff << "\n";
  os << "dt = " << dt << "\n";
  os << "t_max = " << t_max << "\n";
  os << "sample_stride = " << sample_stride << "\n";
  os << "n_max = " << n_max << "\n";
  os << "quad_nodes = " << quad_nodes << "\n";
  os << "seed = " << seed << "\n";
  os << "\n[output]\n";
  os << "directory = " << out_dir << "\n";
  os << "formats = " << (write_csv && write_svg ? "csv,svg" : (write_csv ? "csv" : "svg")) << "\n";
  os << "strict = " << (strict ? "true" : "false") << "\n";
  os << "checkpoints = " << (checkpoints ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace qhf
