#pragma once

#include <vector>

#include "qhf/chain.hpp"
#include "qhf/model.hpp"

namespace qhf::oracle {

// ---- closed-form independent-boson heat statistics (Ohmic J) ----

/// ⟨Q(t)⟩ = α ω_C³ t² / (1 + ω_C² t²); temperature-independent.
double ib_mean(double alpha, double omega_c, double t);

/// ⟨⟨Q²(t)⟩⟩ = ½ ∫ J(ω)(1 − cos ωt) coth(βω/2) dω by adaptive quadrature
/// (relative 1e−8); β may be beta_infinity.
double ib_variance(double alpha, double omega_c, double beta, double t);

/// ln χ(λ,t) = −½ ∫ (J/ω²)(1 − cos ωt)[(1 − cos ωλ) coth(βω/2) − i sin ωλ] dω.
cplx ib_log_char(double alpha, double omega_c, double beta, double lambda, double t);

// ---- dense brute-force simulators on few-mode star baths ----

struct StarMode {
  double freq = 1.0;
  double coupling = 0.0;  // c in  S_x ⊗ c (a + a†)
};

/// Few-mode toy model for the projective two-point-measurement oracle and the
/// doubled heat-operator simulator. Total dense dimensions are hard-capped at
/// 4096 on both paths.
struct DenseModel {
  double epsilon0 = 0.0;
  double delta = 0.0;
  std::vector<SpinBranch> spin{{1.0, {1.0, 0.0}}};
  std::vector<StarMode> modes;
  double beta = beta_infinity;

  std::vector<int> mode_dims;  // thermal-path truncation per mode
  std::vector<int> dims_o;     // doubled-path truncation, original modes
  std::vector<int> dims_a;     // doubled-path truncation, auxiliary modes (ignored at T = 0)

  void validate_tpm() const;      // cap + thermal-tail check (tail mass < 1e−10)
  void validate_doubled() const;  // cap

  /// Smallest truncation with geometric tail below `tail`, plus displacement headroom.
  static int thermal_dim(double beta, double freq, double tail = 1e-12);
  static int displaced_dim(double amplitude);  // Fock cut for a driven mode, |α| bound given
};

/// TPM heat moments by the exact projective double sum: eigendecomposition of
/// the full Hamiltonian, thermal mixture over bath occupation states, and
/// Σ_b π_b ⟨ψ_b(t)|(H_B − E_b)ⁿ|ψ_b(t)⟩.
std::vector<double> dense_tpm_moments(const DenseModel& m, double t, int n_max);

/// Independent route for the first moment: Tr{H_B (ρ(t) − ρ(0))}.
double dense_tpm_mean_via_energy_change(const DenseModel& m, double t);

/// Full TPM characteristic function on the same discretized model.
cplx dense_tpm_char(const DenseModel& m, double lambda, double t);

/// Heat-operator moments on the thermofield-doubled star model: vacuum start,
/// Bogoliubov-scaled couplings, Krylov propagation, diagonal Q̃ powers.
std::vector<double> dense_heat_operator_moments(const DenseModel& m, double t, int n_max);

// ---- dense simulator on a chain layout (cross-check of the tensor path) ----

/// Heat-operator moments evaluated densely on the same chain-mapped layout the
/// tensor path uses, built independently from the chain coefficients by
/// Kronecker products and propagated by Krylov iteration.
/// `which_bath` selects Q̃_j; −1 selects Δ̃_Q = Q̃₂ − Q̃₁ (two-bath layouts).
std::vector<std::vector<double>> dense_chain_heat_moments(
    const SpinBosonParams& params, const std::vector<BathChains>& chains,
    const LayoutPlan& layout, const Eigen::Vector2cd& spin, const std::vector<double>& times,
    int n_max, int which_bath = 0);

/// Dense chain-layout Hamiltonian (for Hermiticity / spectrum checks).
Matrix dense_chain_hamiltonian(const SpinBosonParams& params,
                               const std::vector<BathChains>& chains, const LayoutPlan& layout);

}  // namespace qhf::oracle
