#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qhf/common.hpp"

namespace qhf {

inline constexpr double beta_infinity = std::numeric_limits<double>::infinity();

enum class BathStatistics { bosonic, fermionic };

/// Bath spectral density J(ω) on [0, domain_max], either the Ohmic family
/// J(ω) = 2 α ω exp(−ω/ω_C) or a tabulated curve with linear interpolation.
struct SpectralDensity {
  enum class Kind { ohmic, tabulated };

  Kind kind = Kind::ohmic;
  double alpha = 0.0;   // dimensionless coupling (ohmic)
  double cutoff = 0.0;  // ω_C (ohmic)
  std::vector<std::pair<double, double>> table;  // (ω, J) pairs, ω strictly increasing
  double domain_max = 0.0;  // hard upper frequency Ω used for discretization

  double value(double omega) const;
  // slope of J at ω = 0+, used for the ω → 0 limit of n(ω) J(ω)
  double slope_at_zero() const;

  static SpectralDensity ohmic(double alpha, double cutoff, double domain_max = 0.0);
  static SpectralDensity tabulated(std::vector<std::pair<double, double>> pts,
                                   double domain_max = 0.0);
  // two-column whitespace-delimited text, '#' comments
  static SpectralDensity from_file(const std::string& path, double domain_max = 0.0);
};

/// One bath: spectral density plus thermodynamic state. β = ∞ (qhf::beta_infinity)
/// encodes T = 0; it is branched on explicitly, e^{βω} is never formed at β = ∞.
struct BathSpec {
  SpectralDensity spectral;
  double beta = beta_infinity;
  double mu = 0.0;  // must stay 0 for bosonic baths
  BathStatistics statistics = BathStatistics::bosonic;

  bool zero_temperature() const { return std::isinf(beta); }
  void validate() const;

  static BathSpec ohmic(double alpha, double cutoff, double temperature,
                        double domain_max = 0.0);
};

/// Bogoliubov coefficients of the thermal squeezing, v = √n and
/// u² + (−1)^η v² = 1 (η = 1 bosonic, η = 0 fermionic).
struct BogoliubovFactors {
  BathSpec bath;
  double u(double omega) const;
  double v(double omega) const;
};

struct UvPair {
  double u;
  double v;
};

/// Thermal occupation n_β(ω) = [e^{β(ω−μ)} + (−1)^η]^{−1}; exactly 0 at β = ∞, ω > μ.
double thermal_occupation(double omega, const BathSpec& bath);

UvPair bogoliubov_coefficients(double omega, const BathSpec& bath);

inline BogoliubovFactors bogoliubov_factors(const BathSpec& bath) { return {bath}; }

/// A non-negative weight function dμ/dω on [0, omega_max]. `is_zero` marks the
/// identically vanishing measure (an absent chain, e.g. the auxiliary bath at T = 0).
struct BathMeasure {
  std::function<double(double)> density;
  double omega_max = 0.0;
  bool is_zero = false;

  double operator()(double omega) const { return is_zero ? 0.0 : density(omega); }
};

struct ThermofieldMeasures {
  BathMeasure original;   // dμ_O ∝ u²(ω) J(ω) = J(ω)(1 + n(ω)) for bosons
  BathMeasure auxiliary;  // dμ_A ∝ v²(ω) J(ω) = J(ω) n(ω)
};

/// Splits a thermal bath into the two zero-temperature effective baths of the
/// thermofield doubling. Both measures are evaluated as fused expressions so
/// that n(ω) J(ω) stays finite for ω → 0 and measure_O − measure_A ≡ J holds
/// exactly in floating point.
ThermofieldMeasures thermofield_split(const BathSpec& bath);

}  // namespace qhf
