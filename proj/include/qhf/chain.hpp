#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhf/bath.hpp"

namespace qhf {

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence (no tables).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Quadrature representation of a bath measure: Σ w_k f(ω_k) ≈ ∫ f dμ.
struct DiscretizedMeasure {
  std::vector<double> nodes;    // strictly increasing abscissae
  std::vector<double> weights;  // strictly positive
  std::string source;

  bool empty() const { return nodes.empty(); }
  double total_mass() const;
};

/// Nearest-neighbor chain data (ω_n, t_n, c₀) produced by the
/// orthogonal-polynomial recurrence of a bath measure.
struct ChainCoefficients {
  std::vector<double> site_freqs;  // ω_n, n = 0..L-1
  std::vector<double> hoppings;    // t_n, n = 0..L-2
  double c0 = 0.0;                 // system-to-first-site coupling, c0² = ∫dμ

  int length() const { return static_cast<int>(site_freqs.size()); }
  double max_hopping() const;

  std::string to_table() const;
  static ChainCoefficients from_table(std::istream& in);
};

/// Composite Gauss–Legendre quadrature of `measure` on [0, omega_max] with
/// panel refinement toward ω = 0. Throws domain_error for an identically zero
/// measure ("empty measure"); callers omit the corresponding chain instead.
DiscretizedMeasure discretize_measure(const BathMeasure& measure, int num_nodes);

/// Discretized Stieltjes procedure: monic three-term recurrence coefficients
/// a_n → site_freqs and b_n → hoppings t_n = √b_{n+1}; c0 = √(Σ w_k).
/// Inner products are accumulated in extended precision with running
/// normalized polynomials. Requires length ≤ num_nodes / 4.
ChainCoefficients stieltjes_recurrence(const DiscretizedMeasure& dm, int length);

struct BathChains {
  ChainCoefficients original;
  std::optional<ChainCoefficients> auxiliary;  // absent at T = 0
};

/// thermofield_split ∘ discretize_measure ∘ stieltjes_recurrence for one bath.
/// num_nodes = 0 picks max(4096, 16·length).
BathChains chain_coefficients(const BathSpec& bath, int length, int num_nodes = 0);

/// Shortest chain for which excitations cannot reflect off the far end within
/// t_max, using the 2·max(t_n) light-cone speed bound.
int recommended_chain_length(const ChainCoefficients& chain, double t_max);

}  // namespace qhf
