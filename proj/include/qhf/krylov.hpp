#pragma once

#include <Eigen/Dense>

#include "qhf/common.hpp"

namespace qhf {

/// w = e^{tau·H} v for Hermitian H supplied as a matvec, by Lanczos projection
/// with full reorthogonalization. Converges when the standard a-posteriori
/// residual estimate drops below tol·‖v‖.
template <class MatVec>
Eigen::VectorXcd lanczos_exp(const MatVec& matvec, const Eigen::VectorXcd& v, cplx tau,
                             double tol = 1e-12, int max_dim = 48) {
  using Eigen::MatrixXcd;
  using Eigen::MatrixXd;
  using Eigen::VectorXcd;
  using Eigen::VectorXd;

  const double v_norm = v.norm();
  if (v_norm == 0.0 || tau == cplx(0.0, 0.0)) return v;

  const Eigen::Index n = v.size();
  const int m_cap = static_cast<int>(std::min<Eigen::Index>(max_dim, n));
  MatrixXcd basis(n, m_cap);
  VectorXd alpha(m_cap), beta(m_cap);  // beta[j] couples j and j+1
  basis.col(0) = v / v_norm;

  VectorXcd w(n), small_exp;
  int m = 0;
  for (int j = 0; j < m_cap; ++j) {
    matvec(basis.col(j), w);
    alpha[j] = std::real(basis.col(j).dot(w));
    w -= alpha[j] * basis.col(j);
    if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
    // full reorthogonalization; m stays small so this is cheap
    w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
    m = j + 1;

    MatrixXd tri = MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      tri(k, k) = alpha[k];
      if (k + 1 < m) tri(k, k + 1) = tri(k + 1, k) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(tri);
    VectorXcd phases(m);
    for (int k = 0; k < m; ++k) phases[k] = std::exp(tau * es.eigenvalues()[k]);
    small_exp = es.eigenvectors().cast<cplx>() *
                (phases.array() * es.eigenvectors().row(0).transpose().cast<cplx>().array()).matrix();

    const double h_next = w.norm();
    const double residual = h_next * std::abs(small_exp[m - 1]) * std::abs(tau);
    if (residual < tol || h_next < 1e-14 || j + 1 == m_cap) {
      if (residual >= tol && h_next >= 1e-14)
        throw numerics_error("Krylov exponential did not converge; reduce the time step");
      break;
    }
    beta[j] = h_next;
    basis.col(j + 1) = w / h_next;
  }
  return v_norm * (basis.leftCols(m) * small_exp);
}

}  // namespace qhf
