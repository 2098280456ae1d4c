#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qhf/common.hpp"

namespace qhf {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Rank-3 site tensor A(l, p, r), stored flat with l fastest:
/// index = l + dl·(p + d·r). Both matricizations are zero-copy views.
struct SiteTensor {
  int dl = 1, d = 1, dr = 1;
  Vector data;

  SiteTensor() = default;
  SiteTensor(int dl_, int d_, int dr_) : dl(dl_), d(d_), dr(dr_) {
    data = Vector::Zero(static_cast<Eigen::Index>(dl) * d * dr);
  }

  cplx& at(int l, int p, int r) { return data[l + static_cast<Eigen::Index>(dl) * (p + static_cast<Eigen::Index>(d) * r)]; }
  cplx at(int l, int p, int r) const { return data[l + static_cast<Eigen::Index>(dl) * (p + static_cast<Eigen::Index>(d) * r)]; }

  // (dl·d) × dr
  Eigen::Map<Matrix> left_mat() { return {data.data(), static_cast<Eigen::Index>(dl) * d, dr}; }
  Eigen::Map<const Matrix> left_mat() const { return {data.data(), static_cast<Eigen::Index>(dl) * d, dr}; }
  // dl × (d·dr)
  Eigen::Map<Matrix> right_mat() { return {data.data(), dl, static_cast<Eigen::Index>(d) * dr}; }
  Eigen::Map<const Matrix> right_mat() const { return {data.data(), dl, static_cast<Eigen::Index>(d) * dr}; }
  // physical slice A[p]: dl × dr with outer stride dl·d
  using Slice = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;
  using MutSlice = Eigen::Map<Matrix, 0, Eigen::OuterStride<>>;
  Slice phys_slice(int p) const {
    return {data.data() + static_cast<Eigen::Index>(dl) * p, dl, dr,
            Eigen::OuterStride<>(static_cast<Eigen::Index>(dl) * d)};
  }
  MutSlice phys_slice(int p) {
    return {data.data() + static_cast<Eigen::Index>(dl) * p, dl, dr,
            Eigen::OuterStride<>(static_cast<Eigen::Index>(dl) * d)};
  }
};

/// Pure state as a tensor train. When ortho_center = k every site left of k is
/// a left isometry and every site right of k a right isometry; -1 means no
/// canonical structure is claimed. The represented vector is
/// exp(log_norm) · (contraction of site tensors).
struct TensorTrainState {
  std::vector<SiteTensor> tensors;
  int ortho_center = -1;
  double log_norm = 0.0;
  double truncation_budget = 0.0;   // accumulated relative discarded weight
  bool compression_warning = false; // bond cap hit with weight far above cutoff

  int size() const { return static_cast<int>(tensors.size()); }
  std::vector<int> phys_dims() const;
  int bond_dim(int bond) const { return tensors[bond].dr; }  // bond between site `bond` and `bond+1`
  int max_bond_dim() const;
};

/// One MPO site: a (wl × wr) grid of d×d operator blocks, zero blocks omitted.
struct MpoBlock {
  int wl = 0, wr = 0;
  Matrix op;  // d_out × d_in
};

struct MpoSite {
  int wl = 1, wr = 1, d = 1;
  std::vector<MpoBlock> blocks;
};

/// Operator as a tensor train on the same site layout as a compatible state.
/// Boundary bond dimensions are 1.
struct OperatorTrain {
  std::vector<MpoSite> sites;

  int size() const { return static_cast<int>(sites.size()); }
  std::vector<int> phys_dims() const;
  int bond_dim(int bond) const { return sites[bond].wr; }
  int max_bond_dim() const;
};

/// Knobs of the compression cost model: bond cap D, discarded-weight cutoff ε,
/// and the default bosonic truncation d for chain sites.
struct TruncationPolicy {
  int max_bond = 64;
  double svd_cutoff = 1e-10;
  int local_dim = 8;

  void validate() const {
    if (max_bond < 1) throw domain_error("max_bond must be >= 1");
    if (svd_cutoff < 0.0 || svd_cutoff >= 1.0) throw domain_error("svd_cutoff must be in [0, 1)");
    if (local_dim < 2) throw domain_error("local_dim must be >= 2");
  }
};

/// One product term coeff · Π_site op_site of a Hamiltonian-like operator.
struct OpTerm {
  cplx coeff{1.0, 0.0};
  std::vector<std::pair<int, Matrix>> factors;  // (site, local operator), sites strictly increasing
  std::string provenance;                       // human-readable origin of the term
};

/// Builds an operator train from a sum of product terms with the standard
/// carrier-channel construction; bond dimension is 2 + (#terms crossing the bond).
OperatorTrain operator_train_from_terms(const std::vector<int>& phys_dims,
                                        const std::vector<OpTerm>& terms);

OperatorTrain identity_train(const std::vector<int>& phys_dims);

// local bosonic operators on a d-dimensional Fock cut
Matrix boson_annihilation(int d);
Matrix boson_number(int d);
Matrix boson_position_sum(int d);  // a + a†

}  // namespace qhf
