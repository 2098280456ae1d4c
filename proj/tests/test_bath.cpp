#include <doctest.h>

#include <cmath>
#include <random>

#include "qhf/bath.hpp"

using namespace qhf;

TEST_CASE("thermal occupation scalar values") {
  BathSpec bose = BathSpec::ohmic(0.1, 5.0, 1.0);
  bose.beta = 1.0;
  CHECK(thermal_occupation(1.0, bose) == doctest::Approx(0.5819767068693265).epsilon(1e-12));

  BathSpec cold = BathSpec::ohmic(0.1, 5.0, 0.0);
  CHECK(thermal_occupation(1.0, cold) == 0.0);

  BathSpec fermi = bose;
  fermi.statistics = BathStatistics::fermionic;
  CHECK(thermal_occupation(1.0, fermi) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("bosonic occupation rejects omega <= 0") {
  BathSpec bose = BathSpec::ohmic(0.1, 5.0, 1.0);
  CHECK_THROWS_AS(thermal_occupation(0.0, bose), domain_error);
  CHECK_THROWS_AS(thermal_occupation(-1.0, bose), domain_error);
}

TEST_CASE("bogoliubov coefficients") {
  BathSpec cold = BathSpec::ohmic(0.2, 1.0, 0.0);
  const UvPair uv0 = bogoliubov_coefficients(3.7, cold);
  CHECK(uv0.u == 1.0);
  CHECK(uv0.v == 0.0);

  BathSpec warm = BathSpec::ohmic(0.2, 1.0, 1.0);
  const UvPair uv = bogoliubov_coefficients(1.0, warm);
  CHECK(uv.u == doctest::Approx(std::sqrt(1.5819767068693265)).epsilon(1e-12));
  CHECK(uv.v == doctest::Approx(std::sqrt(0.5819767068693265)).epsilon(1e-12));
}

TEST_CASE("hyperbolic and circular identities hold for random parameters") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uw(1e-3, 20.0), ub(1e-2, 50.0);
  for (int i = 0; i < 200; ++i) {
    BathSpec b = BathSpec::ohmic(0.1, 1.0, 0.0);
    b.beta = ub(rng);
    const double w = uw(rng);
    const UvPair bos = bogoliubov_coefficients(w, b);
    CHECK(bos.u * bos.u - bos.v * bos.v == doctest::Approx(1.0).epsilon(1e-12));

    b.statistics = BathStatistics::fermionic;
    const UvPair fer = bogoliubov_coefficients(w, b);
    CHECK(fer.u * fer.u + fer.v * fer.v == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("thermofield split at zero temperature") {
  BathSpec cold = BathSpec::ohmic(0.1, 5.0, 0.0);
  const ThermofieldMeasures tf = thermofield_split(cold);
  CHECK(tf.auxiliary.is_zero);
  CHECK(tf.original(2.5) == doctest::Approx(cold.spectral.value(2.5)).epsilon(1e-14));
  CHECK(tf.original.omega_max == 50.0);  // Ω defaults to 10 ω_C
}

TEST_CASE("thermofield split pointwise identities at finite temperature") {
  BathSpec warm = BathSpec::ohmic(0.1, 5.0, 1.0);  // β = 1
  const ThermofieldMeasures tf = thermofield_split(warm);
  const SpectralDensity& j = warm.spectral;
  for (double w : {1e-8, 0.037, 0.5, 1.0, 3.0, 12.0, 40.0}) {
    CHECK(tf.original(w) >= 0.0);
    CHECK(tf.auxiliary(w) >= 0.0);
    // u²J − v²J = J exactly (fused evaluation)
    CHECK(tf.original(w) - tf.auxiliary(w) == doctest::Approx(j.value(w)).epsilon(1e-12));
    // detailed balance of the split: A/O = n/(1+n) = e^{−βω}
    CHECK(tf.auxiliary(w) / tf.original(w) == doctest::Approx(std::exp(-w)).epsilon(1e-10));
  }
}

TEST_CASE("auxiliary measure stays finite as omega -> 0") {
  BathSpec warm = BathSpec::ohmic(0.3, 2.0, 0.0);
  warm.beta = 4.0;
  const ThermofieldMeasures tf = thermofield_split(warm);
  // n(ω)J(ω) → 2α/β
  CHECK(tf.auxiliary(1e-300) == doctest::Approx(2.0 * 0.3 / 4.0).epsilon(1e-10));
  CHECK(tf.auxiliary(1e-9) == doctest::Approx(2.0 * 0.3 / 4.0).epsilon(1e-6));
}

TEST_CASE("tabulated spectral densities") {
  CHECK_THROWS_AS(SpectralDensity::tabulated({{1.0, 0.5}, {0.5, 0.2}}), domain_error);
  CHECK_THROWS_AS(SpectralDensity::tabulated({{-1.0, 0.5}}), domain_error);
  CHECK_THROWS_AS(SpectralDensity::tabulated({{1.0, -0.5}}), domain_error);

  const SpectralDensity j = SpectralDensity::tabulated({{1.0, 2.0}, {2.0, 4.0}, {3.0, 0.0}});
  CHECK(j.value(1.5) == doctest::Approx(3.0));
  CHECK(j.value(0.5) == doctest::Approx(1.0));  // linear from the origin
  CHECK(j.value(5.0) == 0.0);
  CHECK(j.domain_max == 3.0);
}

TEST_CASE("bosonic baths reject nonzero chemical potential") {
  BathSpec b = BathSpec::ohmic(0.1, 1.0, 1.0);
  b.mu = 0.3;
  CHECK_THROWS_AS(b.validate(), domain_error);
}
