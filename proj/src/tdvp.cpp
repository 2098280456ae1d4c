#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "qhf/krylov.hpp"
#include "qhf/tt_ops.hpp"

namespace qhf {

namespace {

using EnvBlocks = std::vector<Matrix>;  // one (bra-bond × ket-bond) matrix per MPO channel

EnvBlocks boundary_env() { return {Matrix::Ones(1, 1)}; }

EnvBlocks update_left(const EnvBlocks& env, const SiteTensor& a, const MpoSite& w) {
  EnvBlocks next(w.wr, Matrix::Zero(a.dr, a.dr));
  for (const MpoBlock& blk : w.blocks) {
    for (int q = 0; q < a.d; ++q) {
      Matrix t;
      bool have_t = false;
      for (int p = 0; p < a.d; ++p) {
        const cplx c = blk.op(p, q);
        if (c == cplx(0.0, 0.0)) continue;
        if (!have_t) {
          t.noalias() = env[blk.wl] * a.phys_slice(q);
          have_t = true;
        }
        next[blk.wr].noalias() += c * (a.phys_slice(p).adjoint() * t);
      }
    }
  }
  return next;
}

EnvBlocks update_right(const EnvBlocks& env, const SiteTensor& a, const MpoSite& w) {
  EnvBlocks next(w.wl, Matrix::Zero(a.dl, a.dl));
  for (const MpoBlock& blk : w.blocks) {
    for (int q = 0; q < a.d; ++q) {
      Matrix t;
      bool have_t = false;
      for (int p = 0; p < a.d; ++p) {
        const cplx c = blk.op(p, q);
        if (c == cplx(0.0, 0.0)) continue;
        if (!have_t) {
          t.noalias() = env[blk.wr] * a.phys_slice(q).transpose();
          have_t = true;
        }
        next[blk.wl].noalias() += c * (a.phys_slice(p).conjugate() * t);
      }
    }
  }
  return next;
}

// one-site effective Hamiltonian application: c(l, p, r), l fastest
struct Heff1 {
  const EnvBlocks& lenv;
  const MpoSite& w;
  const EnvBlocks& renv;
  int dl, d, dr;

  void operator()(const Vector& in, Vector& out) const {
    out.setZero(in.size());
    const Eigen::Index stride = static_cast<Eigen::Index>(dl) * d;
    std::vector<Vector> mixed(w.wr);
    std::vector<char> used(w.wr, 0);
    std::vector<Vector> left_applied(w.wl);
    std::vector<char> have_left(w.wl, 0);
    for (const MpoBlock& blk : w.blocks) {
      if (!have_left[blk.wl]) {
        left_applied[blk.wl].resize(in.size());
        Eigen::Map<Matrix>(left_applied[blk.wl].data(), dl, static_cast<Eigen::Index>(d) * dr)
            .noalias() = lenv[blk.wl] *
                         Eigen::Map<const Matrix>(in.data(), dl, static_cast<Eigen::Index>(d) * dr);
        have_left[blk.wl] = 1;
      }
      if (!used[blk.wr]) {
        mixed[blk.wr] = Vector::Zero(in.size());
        used[blk.wr] = 1;
      }
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
          const cplx c = blk.op(p, q);
          if (c == cplx(0.0, 0.0)) continue;
          Eigen::Map<Matrix, 0, Eigen::OuterStride<>>(mixed[blk.wr].data() + static_cast<Eigen::Index>(dl) * p,
                                                      dl, dr, Eigen::OuterStride<>(stride))
              .noalias() +=
              c * Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>(
                      left_applied[blk.wl].data() + static_cast<Eigen::Index>(dl) * q, dl, dr,
                      Eigen::OuterStride<>(stride));
        }
    }
    for (int wr = 0; wr < w.wr; ++wr) {
      if (!used[wr]) continue;
      Eigen::Map<Matrix>(out.data(), stride, dr).noalias() +=
          Eigen::Map<const Matrix>(mixed[wr].data(), stride, dr) * renv[wr].transpose();
    }
  }
};

// two-site effective Hamiltonian application: theta(l, p1, p2, r), l fastest
struct Heff2 {
  const EnvBlocks& lenv;
  const MpoSite& w1;
  const MpoSite& w2;
  const EnvBlocks& renv;
  int dl, d1, d2, dr;

  void operator()(const Vector& in, Vector& out) const {
    out.setZero(in.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(d1) * d2 * dr;
    const Eigen::Index stride1 = static_cast<Eigen::Index>(dl) * d1;  // slice over p1
    const Eigen::Index stride2 = stride1 * d2;                        // slice over p2

    std::vector<Vector> theta_l(w1.wl);
    std::vector<char> have_l(w1.wl, 0);
    std::vector<Vector> x(w1.wr);
    std::vector<char> have_x(w1.wr, 0);
    for (const MpoBlock& blk : w1.blocks) {
      if (!have_l[blk.wl]) {
        theta_l[blk.wl].resize(in.size());
        Eigen::Map<Matrix>(theta_l[blk.wl].data(), dl, cols).noalias() =
            lenv[blk.wl] * Eigen::Map<const Matrix>(in.data(), dl, cols);
        have_l[blk.wl] = 1;
      }
      if (!have_x[blk.wr]) {
        x[blk.wr] = Vector::Zero(in.size());
        have_x[blk.wr] = 1;
      }
      for (int p = 0; p < d1; ++p)
        for (int q = 0; q < d1; ++q) {
          const cplx c = blk.op(p, q);
          if (c == cplx(0.0, 0.0)) continue;
          Eigen::Map<Matrix, 0, Eigen::OuterStride<>>(x[blk.wr].data() + static_cast<Eigen::Index>(dl) * p,
                                                      dl, static_cast<Eigen::Index>(d2) * dr,
                                                      Eigen::OuterStride<>(stride1))
              .noalias() +=
              c * Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>(
                      theta_l[blk.wl].data() + static_cast<Eigen::Index>(dl) * q, dl,
                      static_cast<Eigen::Index>(d2) * dr, Eigen::OuterStride<>(stride1));
        }
    }

    std::vector<Vector> y(w2.wr);
    std::vector<char> have_y(w2.wr, 0);
    for (const MpoBlock& blk : w2.blocks) {
      if (!have_x[blk.wl]) continue;
      if (!have_y[blk.wr]) {
        y[blk.wr] = Vector::Zero(in.size());
        have_y[blk.wr] = 1;
      }
      for (int p = 0; p < d2; ++p)
        for (int q = 0; q < d2; ++q) {
          const cplx c = blk.op(p, q);
          if (c == cplx(0.0, 0.0)) continue;
          Eigen::Map<Matrix, 0, Eigen::OuterStride<>>(y[blk.wr].data() + stride1 * p, stride1, dr,
                                                      Eigen::OuterStride<>(stride2))
              .noalias() += c * Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>(
                                    x[blk.wl].data() + stride1 * q, stride1, dr,
                                    Eigen::OuterStride<>(stride2));
        }
    }

    for (int wr = 0; wr < w2.wr; ++wr) {
      if (!have_y[wr]) continue;
      Eigen::Map<Matrix>(out.data(), stride2, dr).noalias() +=
          Eigen::Map<const Matrix>(y[wr].data(), stride2, dr) * renv[wr].transpose();
    }
  }
};

struct BondSplit {
  SiteTensor left_iso;   // (dl, d1, keep)
  Matrix carry;          // U·S or S·V† depending on direction consumer
  SiteTensor right_iso;  // (keep, d2, dr)
  Eigen::VectorXd s;
  double discarded = 0.0;
  bool cap_forced = false;
};

BondSplit split_theta(const Vector& theta, int dl, int d1, int d2, int dr,
                      const TruncationPolicy& policy) {
  Eigen::Map<const Matrix> m(theta.data(), static_cast<Eigen::Index>(dl) * d1,
                             static_cast<Eigen::Index>(d2) * dr);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const int n = static_cast<int>(s.size());
  const double total = s.squaredNorm();

  int keep = n;
  if (total > 0.0) {
    double tail = 0.0;
    while (keep > 1) {
      const double cand = tail + s[keep - 1] * s[keep - 1];
      if (cand > policy.svd_cutoff * total) break;
      tail = cand;
      --keep;
    }
  } else {
    keep = 1;
  }
  BondSplit out;
  out.cap_forced = keep > policy.max_bond;
  keep = std::min(keep, policy.max_bond);
  double disc = 0.0;
  for (int i = keep; i < n; ++i) disc += s[i] * s[i];
  out.discarded = total > 0.0 ? disc / total : 0.0;

  out.s = s.head(keep);
  out.left_iso = SiteTensor(dl, d1, keep);
  out.left_iso.left_mat() = svd.matrixU().leftCols(keep);
  out.right_iso = SiteTensor(keep, d2, dr);
  out.right_iso.right_mat() = svd.matrixV().leftCols(keep).adjoint();
  return out;
}

Vector merge_sites(const SiteTensor& a, const SiteTensor& b) {
  Vector theta(static_cast<Eigen::Index>(a.dl) * a.d * b.d * b.dr);
  Eigen::Map<Matrix>(theta.data(), static_cast<Eigen::Index>(a.dl) * a.d,
                     static_cast<Eigen::Index>(b.d) * b.dr)
      .noalias() = a.left_mat() * b.right_mat();
  return theta;
}

constexpr double krylov_tol = 1e-12;

}  // namespace

void evolve_step(TensorTrainState& state, const OperatorTrain& hamiltonian, double dt,
                 const TruncationPolicy& policy) {
  policy.validate();
  if (state.phys_dims() != hamiltonian.phys_dims())
    throw domain_error("evolve_step: layout mismatch");
  if (dt == 0.0) return;
  if (!std::isfinite(dt)) throw domain_error("evolve_step: dt must be finite");

  const int n = state.size();
  const cplx tau_fwd(0.0, -0.5 * dt);
  const cplx tau_bwd(0.0, +0.5 * dt);

  if (n == 1) {
    const EnvBlocks triv = boundary_env();
    SiteTensor& a = state.tensors[0];
    Heff1 h{triv, hamiltonian.sites[0], triv, a.dl, a.d, a.dr};
    a.data = lanczos_exp(h, a.data, cplx(0.0, -dt), krylov_tol, std::max(4, 2 * a.d));
    state.ortho_center = 0;
    if (!a.data.allFinite()) throw numerics_error("evolve_step: non-finite state");
    return;
  }

  canonicalize(state);

  std::vector<EnvBlocks> lenv(n + 1), renv(n + 1);
  lenv[0] = boundary_env();
  renv[n] = boundary_env();
  for (int k = n - 1; k >= 1; --k)
    renv[k] = update_right(renv[k + 1], state.tensors[k], hamiltonian.sites[k]);

  auto evolve_bond = [&](int i, bool backward_next, int next_site) {
    SiteTensor& a = state.tensors[i];
    SiteTensor& b = state.tensors[i + 1];
    Vector theta = merge_sites(a, b);
    Heff2 h2{lenv[i], hamiltonian.sites[i], hamiltonian.sites[i + 1], renv[i + 2],
             a.dl, a.d, b.d, b.dr};
    theta = lanczos_exp(h2, theta, tau_fwd, krylov_tol);
    BondSplit split = split_theta(theta, a.dl, a.d, b.d, b.dr, policy);
    state.truncation_budget += split.discarded;
    if (split.cap_forced && split.discarded > 100.0 * policy.svd_cutoff)
      state.compression_warning = true;

    a = std::move(split.left_iso);
    b = std::move(split.right_iso);
    const int keep = static_cast<int>(split.s.size());
    if (next_site == i + 1) {
      // continuing right: absorb S into b, back-evolve b
      b.right_mat() = split.s.cast<cplx>().asDiagonal() * Matrix(b.right_mat());
      lenv[i + 1] = update_left(lenv[i], a, hamiltonian.sites[i]);
      if (backward_next) {
        Heff1 h1{lenv[i + 1], hamiltonian.sites[i + 1], renv[i + 2], keep, b.d, b.dr};
        b.data = lanczos_exp(h1, b.data, tau_bwd, krylov_tol);
      }
      state.ortho_center = i + 1;
    } else {
      // continuing left: absorb S into a, back-evolve a
      a.left_mat() = Matrix(a.left_mat()) * split.s.cast<cplx>().asDiagonal();
      renv[i + 1] = update_right(renv[i + 2], b, hamiltonian.sites[i + 1]);
      if (backward_next) {
        Heff1 h1{lenv[i], hamiltonian.sites[i], renv[i + 1], a.dl, a.d, keep};
        a.data = lanczos_exp(h1, a.data, tau_bwd, krylov_tol);
      }
      state.ortho_center = i;
    }
  };

  for (int i = 0; i <= n - 2; ++i) evolve_bond(i, /*backward_next=*/i < n - 2, i + 1);
  for (int i = n - 2; i >= 0; --i) evolve_bond(i, /*backward_next=*/i > 0, i);

  if (!state.tensors[state.ortho_center].data.allFinite())
    throw numerics_error("evolve_step: state became non-finite (NaN blow-up)");
}

}  // namespace qhf
