#include "qhf/bath.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qhf {

double SpectralDensity::value(double omega) const {
  if (omega < 0.0) throw domain_error("spectral density queried at negative frequency");
  if (kind == Kind::ohmic) return 2.0 * alpha * omega * std::exp(-omega / cutoff);
  // tabulated: linear interpolation, zero outside the table
  if (table.empty() || omega > table.back().first) return 0.0;
  if (omega <= table.front().first) {
    // interpolate from the origin (J(0) = 0 for any integrable bath)
    const auto& [w0, j0] = table.front();
    return w0 > 0.0 ? j0 * omega / w0 : j0;
  }
  auto hi = std::lower_bound(table.begin(), table.end(), omega,
                             [](const auto& p, double w) { return p.first < w; });
  auto lo = hi - 1;
  const double s = (omega - lo->first) / (hi->first - lo->first);
  return lo->second + s * (hi->second - lo->second);
}

double SpectralDensity::slope_at_zero() const {
  if (kind == Kind::ohmic) return 2.0 * alpha;
  if (table.empty()) return 0.0;
  const auto& [w0, j0] = table.front();
  return w0 > 0.0 ? j0 / w0 : 0.0;
}

SpectralDensity SpectralDensity::ohmic(double alpha, double cutoff, double domain_max) {
  if (cutoff <= 0.0) throw domain_error("ohmic cutoff must be positive");
  if (alpha < 0.0) throw domain_error("ohmic coupling alpha must be non-negative");
  SpectralDensity j;
  j.kind = Kind::ohmic;
  j.alpha = alpha;
  j.cutoff = cutoff;
  j.domain_max = domain_max > 0.0 ? domain_max : 10.0 * cutoff;
  return j;
}

SpectralDensity SpectralDensity::tabulated(std::vector<std::pair<double, double>> pts,
                                           double domain_max) {
  if (pts.empty()) throw domain_error("tabulated spectral density needs at least one point");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].first < 0.0) throw domain_error("tabulated spectral density has negative frequency");
    if (pts[i].second < 0.0) throw domain_error("tabulated spectral density has negative J value");
    if (i > 0 && pts[i].first <= pts[i - 1].first)
      throw domain_error("tabulated frequencies must be strictly increasing");
  }
  SpectralDensity j;
  j.kind = Kind::tabulated;
  j.table = std::move(pts);
  j.domain_max = domain_max > 0.0 ? domain_max : j.table.back().first;
  if (j.domain_max > j.table.back().first)
    throw domain_error("domain_max exceeds the tabulated range");
  return j;
}

SpectralDensity SpectralDensity::from_file(const std::string& path, double domain_max) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open spectral density file: " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double w, j;
    if (!(ss >> w)) continue;  // blank / comment-only line
    if (!(ss >> j))
      throw domain_error(path + ":" + std::to_string(lineno) + ": expected two columns (omega J)");
    pts.emplace_back(w, j);
  }
  return tabulated(std::move(pts), domain_max);
}

void BathSpec::validate() const {
  if (beta < 0.0 || std::isnan(beta)) throw domain_error("inverse temperature must be >= 0 or infinite");
  if (statistics == BathStatistics::bosonic && mu != 0.0)
    throw domain_error("bosonic baths require mu = 0");
  if (spectral.domain_max <= 0.0) throw domain_error("spectral density domain_max must be positive");
}

BathSpec BathSpec::ohmic(double alpha, double cutoff, double temperature, double domain_max) {
  if (temperature < 0.0) throw domain_error("temperature must be non-negative");
  BathSpec b;
  b.spectral = SpectralDensity::ohmic(alpha, cutoff, domain_max);
  b.beta = temperature == 0.0 ? beta_infinity : 1.0 / temperature;
  return b;
}

double thermal_occupation(double omega, const BathSpec& bath) {
  bath.validate();
  if (bath.statistics == BathStatistics::bosonic && omega <= 0.0)
    throw domain_error("bosonic occupation diverges at omega <= 0; integrate n(ω)J(ω) instead");
  const double x = omega - bath.mu;
  if (bath.zero_temperature()) {
    if (x > 0.0) return 0.0;
    // fermionic sea below the chemical potential
    return x < 0.0 ? 1.0 : 0.5;
  }
  if (bath.beta == 0.0 && bath.statistics == BathStatistics::bosonic)
    throw domain_error("bosonic occupation diverges at beta = 0");
  if (bath.statistics == BathStatistics::bosonic) return 1.0 / std::expm1(bath.beta * x);
  return 1.0 / (std::exp(bath.beta * x) + 1.0);
}

UvPair bogoliubov_coefficients(double omega, const BathSpec& bath) {
  const double n = thermal_occupation(omega, bath);
  const double v = std::sqrt(n);
  const double u = bath.statistics == BathStatistics::bosonic ? std::sqrt(1.0 + n)
                                                              : std::sqrt(1.0 - n);
  return {u, v};
}

double BogoliubovFactors::u(double omega) const { return bogoliubov_coefficients(omega, bath).u; }
double BogoliubovFactors::v(double omega) const { return bogoliubov_coefficients(omega, bath).v; }

ThermofieldMeasures thermofield_split(const BathSpec& bath) {
  bath.validate();
  if (bath.statistics != BathStatistics::bosonic)
    throw domain_error("thermofield_split supports bosonic baths only");

  const SpectralDensity j = bath.spectral;
  const double omega_max = j.domain_max;

  ThermofieldMeasures out;
  out.original.omega_max = omega_max;
  out.auxiliary.omega_max = omega_max;

  if (bath.zero_temperature()) {
    out.original.density = [j](double w) { return j.value(w); };
    out.auxiliary.is_zero = true;
    out.auxiliary.density = [](double) { return 0.0; };
    return out;
  }

  const double beta = bath.beta;
  const double slope0 = j.slope_at_zero();
  // scale below which n(ω)J(ω) is replaced by its analytic ω → 0 limit J'(0)/β
  const double tiny = 1e-12 * (j.kind == SpectralDensity::Kind::ohmic ? j.cutoff : omega_max);

  auto aux = [j, beta, slope0, tiny](double w) {
    if (w <= tiny) return slope0 / beta;
    return j.value(w) / std::expm1(beta * w);
  };
  out.auxiliary.density = aux;
  // u²J = J + nJ, so (measure_O − measure_A)(ω) = J(ω) exactly
  out.original.density = [j, aux](double w) { return j.value(w) + aux(w); };
  return out;
}

}  // namespace qhf
