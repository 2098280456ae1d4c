#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "qhf/chain.hpp"

using namespace qhf;

namespace {

BathMeasure ohmic_measure(double alpha, double cutoff, double omega_max) {
  BathMeasure m;
  m.omega_max = omega_max;
  m.density = [=](double w) { return 2.0 * alpha * w * std::exp(-w / cutoff); };
  return m;
}

}  // namespace

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double total = 0.0, x14 = 0.0;
  for (int i = 0; i < 8; ++i) {
    total += w[i];
    x14 += w[i] * std::pow(x[i], 14);
  }
  CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));  // ∫x^14 = 2/15
}

TEST_CASE("discretized mass matches adaptive reference integration") {
  const BathMeasure m = ohmic_measure(0.1, 1.0, 10.0);
  const DiscretizedMeasure dm = discretize_measure(m, 2000);
  double err = 0.0;
  const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      m.density, 0.0, 10.0, 12, 1e-13, &err);
  CHECK(dm.total_mass() == doctest::Approx(ref).epsilon(1e-10));
  // calibrated normalization dμ = J dω: mass → 2 α ω_C² as Ω → ∞
  CHECK(dm.total_mass() == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("empty measure is flagged") {
  BathMeasure zero;
  zero.omega_max = 1.0;
  zero.is_zero = true;
  zero.density = [](double) { return 0.0; };
  CHECK_THROWS_WITH_AS(discretize_measure(zero, 256), "empty measure", domain_error);

  BathMeasure null_density = ohmic_measure(0.0, 1.0, 1.0);
  CHECK_THROWS_WITH_AS(discretize_measure(null_density, 256), "empty measure", domain_error);
}

TEST_CASE("narrow measure conserves mass on a dominant node cluster") {
  BathMeasure narrow;
  narrow.omega_max = 10.0;
  narrow.density = [](double w) {
    const double d = (w - 3.0) / 0.01;
    return std::exp(-0.5 * d * d);
  };
  const DiscretizedMeasure dm = discretize_measure(narrow, 8000);
  const double mass_ref = 0.01 * std::sqrt(2.0 * M_PI);
  CHECK(dm.total_mass() == doctest::Approx(mass_ref).epsilon(1e-6));
  double near = 0.0;
  for (std::size_t i = 0; i < dm.nodes.size(); ++i)
    if (std::abs(dm.nodes[i] - 3.0) < 0.1) near += dm.weights[i];
  CHECK(near / dm.total_mass() > 0.999999);
}

TEST_CASE("stieltjes reproduces the generalized-Laguerre recurrence") {
  const DiscretizedMeasure dm = discretize_measure(ohmic_measure(0.1, 1.0, 150.0), 6000);
  const ChainCoefficients c = stieltjes_recurrence(dm, 21);
  CHECK(c.c0 * c.c0 == doctest::Approx(dm.total_mass()).epsilon(1e-13));
  for (int n = 0; n < 20; ++n) {
    CHECK(c.site_freqs[n] == doctest::Approx(2.0 * n + 2.0).epsilon(1e-9));
    CHECK(c.hoppings[n] ==
          doctest::Approx(std::sqrt(static_cast<double>((n + 1) * (n + 2)))).epsilon(1e-9));
  }
}

TEST_CASE("stieltjes reproduces the shifted-Legendre recurrence") {
  BathMeasure uniform;
  uniform.omega_max = 1.0;
  uniform.density = [](double) { return 1.0; };
  const ChainCoefficients c = stieltjes_recurrence(discretize_measure(uniform, 4000), 21);
  for (int n = 0; n < 20; ++n) {
    CHECK(c.site_freqs[n] == doctest::Approx(0.5).epsilon(1e-10));
    const double b = static_cast<double>((n + 1) * (n + 1)) /
                     (4.0 * (4.0 * (n + 1) * (n + 1) - 1.0));
    CHECK(c.hoppings[n] == doctest::Approx(std::sqrt(b)).epsilon(1e-10));
  }
}

TEST_CASE("scale covariance of chain coefficients") {
  const double s = 5.0;
  const DiscretizedMeasure base = discretize_measure(ohmic_measure(0.3, 1.0, 12.0), 4000);
  BathMeasure scaled;
  scaled.omega_max = 12.0 * s;
  scaled.density = [](double w) { return 2.0 * 0.3 * (w / 5.0) * std::exp(-w / 5.0); };
  const DiscretizedMeasure big = discretize_measure(scaled, 4000);

  const ChainCoefficients c1 = stieltjes_recurrence(base, 16);
  const ChainCoefficients c2 = stieltjes_recurrence(big, 16);
  CHECK(c2.c0 == doctest::Approx(std::sqrt(s) * c1.c0).epsilon(1e-10));
  for (int n = 0; n < 16; ++n)
    CHECK(c2.site_freqs[n] == doctest::Approx(s * c1.site_freqs[n]).epsilon(1e-10));
  for (int n = 0; n < 15; ++n)
    CHECK(c2.hoppings[n] == doctest::Approx(s * c1.hoppings[n]).epsilon(1e-10));
}

TEST_CASE("node doubling leaves retained coefficients unchanged") {
  const ChainCoefficients a =
      stieltjes_recurrence(discretize_measure(ohmic_measure(0.1, 1.0, 10.0), 4000), 32);
  const ChainCoefficients b =
      stieltjes_recurrence(discretize_measure(ohmic_measure(0.1, 1.0, 10.0), 8000), 32);
  for (int n = 0; n < 32; ++n) {
    CHECK(std::abs(a.site_freqs[n] - b.site_freqs[n]) / b.site_freqs[n] < 1e-9);
    if (n < 31) CHECK(std::abs(a.hoppings[n] - b.hoppings[n]) / b.hoppings[n] < 1e-9);
  }
}

TEST_CASE("stability margin is enforced") {
  const DiscretizedMeasure dm = discretize_measure(ohmic_measure(0.1, 1.0, 10.0), 256);
  CHECK_THROWS_AS(stieltjes_recurrence(dm, 100), domain_error);
}

TEST_CASE("measure resolution exhaustion names the failing index") {
  // a 3-point measure supports exactly 3 orthogonal polynomials
  DiscretizedMeasure dm;
  dm.nodes = {1.0, 2.0, 3.0};
  dm.weights = {0.2, 0.5, 0.3};
  const ChainCoefficients ok = stieltjes_recurrence(dm, 3);
  CHECK(ok.length() == 3);
  try {
    // relax the margin by inflating nodes artificially
    DiscretizedMeasure wide = dm;
    for (int r = 0; r < 5; ++r) {
      wide.nodes.insert(wide.nodes.end(), dm.nodes.begin(), dm.nodes.end());
      wide.weights.insert(wide.weights.end(), dm.weights.begin(), dm.weights.end());
    }
    stieltjes_recurrence(wide, 4);
    FAIL("expected a numerics_error");
  } catch (const numerics_error& e) {
    CHECK(std::string(e.what()).find("index 3") != std::string::npos);
  }
}

TEST_CASE("chain_coefficients composes the thermofield split") {
  BathSpec cold = BathSpec::ohmic(0.1, 5.0, 0.0);
  const BathChains chains = chain_coefficients(cold, 20);
  CHECK_FALSE(chains.auxiliary.has_value());
  // Laguerre closed form scaled by ω_C: first site frequency 2 ω_C
  CHECK(chains.original.site_freqs[0] == doctest::Approx(10.0).epsilon(1e-6));

  BathSpec warm = BathSpec::ohmic(0.1, 5.0, 1.0, 30.0);
  const BathChains both = chain_coefficients(warm, 16);
  REQUIRE(both.auxiliary.has_value());
  // c0_O² + c0_A² = ∫(1+n)J + ∫nJ, checked against adaptive quadrature
  auto j = [](double w) { return 0.2 * w * std::exp(-w / 5.0); };
  auto nj = [&](double w) { return j(w) / std::expm1(w); };
  double err = 0.0;
  const double mass_o = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double w) { return j(w) + nj(w); }, 0.0, 30.0, 12, 1e-13, &err);
  const double mass_a = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      nj, 1e-14, 30.0, 12, 1e-13, &err);
  CHECK(both.original.c0 * both.original.c0 == doctest::Approx(mass_o).epsilon(1e-8));
  CHECK(both.auxiliary->c0 * both.auxiliary->c0 == doctest::Approx(mass_a).epsilon(1e-8));
}

TEST_CASE("chain table round trip") {
  BathSpec cold = BathSpec::ohmic(0.25, 2.0, 0.0);
  const ChainCoefficients c = chain_coefficients(cold, 12).original;
  std::istringstream in(c.to_table());
  const ChainCoefficients back = ChainCoefficients::from_table(in);
  REQUIRE(back.length() == c.length());
  CHECK(back.c0 == doctest::Approx(c.c0).epsilon(1e-15));
  for (int n = 0; n < 12; ++n)
    CHECK(back.site_freqs[n] == doctest::Approx(c.site_freqs[n]).epsilon(1e-15));
  for (int n = 0; n < 11; ++n)
    CHECK(back.hoppings[n] == doctest::Approx(c.hoppings[n]).epsilon(1e-15));
}
