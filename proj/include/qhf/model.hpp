#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhf/bath.hpp"
#include "qhf/chain.hpp"
#include "qhf/tensor.hpp"

namespace qhf {

/// Pure spin states in the spectral decomposition of ρ_S(0).
struct SpinBranch {
  double weight = 1.0;
  Eigen::Vector2cd state;  // basis (|↑⟩_z, |↓⟩_z)
};

/// Two-level system parameters: H_S = ε₀ S_z + Δ S_x, bath coupling through S_x.
struct SpinBosonParams {
  double epsilon0 = 0.0;
  double delta = 0.0;
  std::vector<SpinBranch> initial_state;  // weights ≥ 0 summing to 1

  void validate() const;
};

/// Named initial states and Bloch vectors; |r| < 1 yields the two-branch
/// spectral decomposition with weights (1 ± |r|)/2.
std::vector<SpinBranch> spin_state_named(const std::string& name);
std::vector<SpinBranch> spin_state_bloch(double x, double y, double z);

struct LayoutSite {
  enum class Role { system, chain };
  Role role = Role::chain;
  int bath = -1;           // bath index for chain sites
  bool auxiliary = false;  // member of the A chain
  int position = -1;       // chain coordinate, 0 couples to the system
  int phys_dim = 2;
};

/// 1D site ordering. Single bath: [A reversed][system][O]; two baths:
/// [A₁ rev][O₁ rev][system][O₂][A₂]. Absent (T = 0) chains are omitted.
struct LayoutPlan {
  std::vector<LayoutSite> sites;
  int system_site = -1;

  int size() const { return static_cast<int>(sites.size()); }
  std::vector<int> phys_dims() const;
  int chain_site(int bath, bool auxiliary, int position) const;  // -1 when absent
  int chain_length(int bath, bool auxiliary) const;
};

/// Per-site bosonic truncation: chain_near at the system end tapering linearly
/// to chain_min over taper_sites (taper_sites < 0 → half the chain).
struct LocalDims {
  int spin_dim = 2;
  int chain_near = 8;
  int chain_min = 4;
  int taper_sites = -1;

  int chain_dim_at(int position, int chain_len) const;
};

struct ChainLengths {
  int original = 0;
  int auxiliary = 0;  // 0 when the bath is at T = 0
};

LayoutPlan plan_layout(const std::vector<ChainLengths>& chain_lengths, const LocalDims& dims);

/// Transformed Hamiltonian on a layout: system term, +chain for every O bath,
/// −chain for every A bath (free part negated, coupling entering positively).
struct HamiltonianTrain {
  OperatorTrain op;
  std::vector<OpTerm> terms;  // per-term provenance for audits

  std::string dump_terms() const;
};

HamiltonianTrain build_transformed_hamiltonian(const SpinBosonParams& params,
                                               const std::vector<BathChains>& chains,
                                               const LayoutPlan& layout);

/// Heat operators in chain coordinates: Q̃_j = H_{B,O,j} − H_{B,A,j}, and for
/// two baths the combined Δ̃_Q = Q̃₂ − Q̃₁ measured as a single operator.
struct HeatOperatorSpec {
  std::vector<OperatorTrain> per_bath;
  std::optional<OperatorTrain> delta;
};

HeatOperatorSpec build_heat_operator(const std::vector<BathChains>& chains,
                                     const LayoutPlan& layout);

/// Initial product state: spin branch at the system site, vacuum elsewhere.
TensorTrainState initial_global_state(const LayoutPlan& layout, const Eigen::Vector2cd& spin);

Matrix spin_sx();
Matrix spin_sz();

}  // namespace qhf
