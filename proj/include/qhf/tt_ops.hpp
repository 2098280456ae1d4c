#pragma once

#include "qhf/tensor.hpp"

namespace qhf {

/// ⊗|0⟩ product state: every site in its occupation-0 basis vector, norm 1.
TensorTrainState vacuum_state(const std::vector<int>& phys_dims);

/// Product state with the given per-site unit vectors.
TensorTrainState product_state(const std::vector<Vector>& site_vectors);

/// ⟨x|y⟩ including both log-norm factors.
cplx inner(const TensorTrainState& x, const TensorTrainState& y);

double norm(const TensorTrainState& state);

/// Exact ⟨state|op|state⟩ by a single environment sweep (no compression).
cplx expectation(const TensorTrainState& state, const OperatorTrain& op);

/// Moves the orthogonality center to `site` by QR sweeps (no truncation).
void move_center(TensorTrainState& state, int site);

/// Right-canonicalizes (center 0). Idempotent.
void canonicalize(TensorTrainState& state);

/// Largest deviation of any claimed isometry from unitarity; for tests.
double canonical_form_error(const TensorTrainState& state);

/// Compressed op|state⟩. Exact local application followed by a two-sweep
/// canonicalize + SVD truncation pass; the relative discarded weight is added
/// to the result's truncation_budget. Hitting the bond cap with discarded
/// weight above 100× the cutoff sets compression_warning instead of failing.
TensorTrainState apply_operator(const TensorTrainState& state, const OperatorTrain& op,
                                const TruncationPolicy& policy);

/// One step of e^{−iH dt} by symmetric two-site sweeping variational
/// integration against the operator train (second order in dt). Grows and
/// truncates bond dimensions per `policy`. Aborts with numerics_error on NaN.
void evolve_step(TensorTrainState& state, const OperatorTrain& hamiltonian, double dt,
                 const TruncationPolicy& policy);

// --- dense bridges (small instances: tests, oracles, audits) ---

Vector state_to_dense(const TensorTrainState& state);
Matrix operator_to_dense(const OperatorTrain& op);

/// Exact TT factorization of a dense operator by sequential SVD.
OperatorTrain operator_from_dense(const std::vector<int>& phys_dims, const Matrix& dense,
                                  double cutoff = 1e-13);

std::size_t total_dense_dim(const std::vector<int>& phys_dims);

}  // namespace qhf
