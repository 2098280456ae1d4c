#include "qhf/tt_ops.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>

namespace qhf {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct SvdSplit {
  Matrix u;            // m × keep
  Eigen::VectorXd s;   // keep
  Matrix v;            // n × keep, input ≈ u · diag(s) · v†
  double discarded = 0.0;
  bool cap_forced = false;  // truncation forced by the bond cap, not the cutoff
};

SvdSplit svd_truncate(const Matrix& m, const TruncationPolicy& policy) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const int n = static_cast<int>(s.size());
  const double total = s.squaredNorm();

  SvdSplit out;
  if (total <= 0.0) {  // zero matrix: keep a single zero column
    out.u = svd.matrixU().leftCols(1);
    out.s = Eigen::VectorXd::Zero(1);
    out.v = svd.matrixV().leftCols(1);
    return out;
  }

  int keep_cutoff = n;
  double tail = 0.0;
  while (keep_cutoff > 1) {
    const double cand = tail + s[keep_cutoff - 1] * s[keep_cutoff - 1];
    if (cand > policy.svd_cutoff * total) break;
    tail = cand;
    --keep_cutoff;
  }
  int keep = std::min(keep_cutoff, policy.max_bond);
  out.cap_forced = keep < keep_cutoff;
  double disc = 0.0;
  for (int i = keep; i < n; ++i) disc += s[i] * s[i];
  out.discarded = disc / total;
  out.u = svd.matrixU().leftCols(keep);
  out.s = s.head(keep);
  out.v = svd.matrixV().leftCols(keep);
  return out;
}

void thin_qr(const Matrix& m, Matrix& q, Matrix& r) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  q = qr.householderQ() * Matrix::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
}

// center k → k+1, no truncation
void shift_center_right(TensorTrainState& state, int k) {
  SiteTensor& a = state.tensors[k];
  Matrix q, r;
  thin_qr(a.left_mat(), q, r);
  const int new_dr = static_cast<int>(q.cols());
  SiteTensor left(a.dl, a.d, new_dr);
  left.left_mat() = q;
  SiteTensor& b = state.tensors[k + 1];
  SiteTensor right(new_dr, b.d, b.dr);
  right.right_mat() = r * b.right_mat();
  a = std::move(left);
  b = std::move(right);
}

// center k → k-1, no truncation
void shift_center_left(TensorTrainState& state, int k) {
  SiteTensor& a = state.tensors[k];
  Matrix q, r;
  thin_qr(a.right_mat().adjoint(), q, r);  // M = r† q†
  const int new_dl = static_cast<int>(q.cols());
  SiteTensor right(new_dl, a.d, a.dr);
  right.right_mat() = q.adjoint();
  SiteTensor& b = state.tensors[k - 1];
  SiteTensor left(b.dl, b.d, new_dl);
  left.left_mat() = b.left_mat() * r.adjoint();
  a = std::move(right);
  b = std::move(left);
}

}  // namespace

std::vector<int> TensorTrainState::phys_dims() const {
  std::vector<int> dims(tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) dims[i] = tensors[i].d;
  return dims;
}

int TensorTrainState::max_bond_dim() const {
  int m = 1;
  for (const auto& t : tensors) m = std::max(m, t.dr);
  return m;
}

std::vector<int> OperatorTrain::phys_dims() const {
  std::vector<int> dims(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) dims[i] = sites[i].d;
  return dims;
}

int OperatorTrain::max_bond_dim() const {
  int m = 1;
  for (const auto& s : sites) m = std::max(m, s.wr);
  return m;
}

Matrix boson_annihilation(int d) {
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix boson_number(int d) {
  Matrix n = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = k;
  return n;
}

Matrix boson_position_sum(int d) {
  const Matrix a = boson_annihilation(d);
  return a + a.adjoint();
}

TensorTrainState vacuum_state(const std::vector<int>& phys_dims) {
  std::vector<Vector> vecs;
  vecs.reserve(phys_dims.size());
  for (int d : phys_dims) {
    if (d < 1) throw domain_error("physical dimension must be >= 1");
    Vector v = Vector::Zero(d);
    v[0] = 1.0;
    vecs.push_back(std::move(v));
  }
  return product_state(vecs);
}

TensorTrainState product_state(const std::vector<Vector>& site_vectors) {
  if (site_vectors.empty()) throw domain_error("product state needs at least one site");
  TensorTrainState state;
  state.tensors.reserve(site_vectors.size());
  for (const Vector& v : site_vectors) {
    SiteTensor t(1, static_cast<int>(v.size()), 1);
    for (int p = 0; p < t.d; ++p) t.at(0, p, 0) = v[p];
    state.tensors.push_back(std::move(t));
  }
  state.ortho_center = 0;
  return state;
}

cplx inner(const TensorTrainState& x, const TensorTrainState& y) {
  if (x.phys_dims() != y.phys_dims()) throw domain_error("inner: layout mismatch");
  Matrix env = Matrix::Ones(1, 1);
  for (int k = 0; k < x.size(); ++k) {
    const SiteTensor& a = x.tensors[k];
    const SiteTensor& b = y.tensors[k];
    Matrix next = Matrix::Zero(a.dr, b.dr);
    for (int p = 0; p < a.d; ++p) next.noalias() += a.phys_slice(p).adjoint() * env * b.phys_slice(p);
    env = std::move(next);
  }
  return env(0, 0) * std::exp(x.log_norm + y.log_norm);
}

double norm(const TensorTrainState& state) {
  if (state.ortho_center >= 0)
    return state.tensors[state.ortho_center].data.norm() * std::exp(state.log_norm);
  return std::sqrt(std::abs(inner(state, state)));
}

cplx expectation(const TensorTrainState& state, const OperatorTrain& op) {
  if (state.phys_dims() != op.phys_dims()) throw domain_error("expectation: layout mismatch");
  std::vector<Matrix> env(1, Matrix::Ones(1, 1));
  for (int k = 0; k < state.size(); ++k) {
    const SiteTensor& a = state.tensors[k];
    const MpoSite& w = op.sites[k];
    std::vector<Matrix> next(w.wr, Matrix::Zero(a.dr, a.dr));
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
    env = std::move(next);
  }
  return env[0](0, 0) * std::exp(2.0 * state.log_norm);
}

void move_center(TensorTrainState& state, int site) {
  if (site < 0 || site >= state.size()) throw domain_error("move_center: site out of range");
  if (state.ortho_center < 0) {
    // establish canonical structure from the right end
    for (int k = state.size() - 1; k > 0; --k) shift_center_left(state, k);
    state.ortho_center = 0;
  }
  while (state.ortho_center < site) shift_center_right(state, state.ortho_center++);
  while (state.ortho_center > site) shift_center_left(state, state.ortho_center--);
}

void canonicalize(TensorTrainState& state) { move_center(state, 0); }

double canonical_form_error(const TensorTrainState& state) {
  if (state.ortho_center < 0) return 0.0;
  double err = 0.0;
  for (int k = 0; k < state.size(); ++k) {
    if (k < state.ortho_center) {
      const auto m = state.tensors[k].left_mat();
      err = std::max(err, (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff());
    } else if (k > state.ortho_center) {
      const auto m = state.tensors[k].right_mat();
      err = std::max(err, (m * m.adjoint() - Matrix::Identity(m.rows(), m.rows())).cwiseAbs().maxCoeff());
    }
  }
  return err;
}

OperatorTrain operator_train_from_terms(const std::vector<int>& phys_dims,
                                        const std::vector<OpTerm>& terms) {
  const int n_sites = static_cast<int>(phys_dims.size());
  if (n_sites == 0) throw domain_error("operator train needs at least one site");
  for (const OpTerm& t : terms) {
    if (t.factors.empty()) throw domain_error("operator term has no factors");
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      const auto& [site, op] = t.factors[i];
      if (site < 0 || site >= n_sites) throw domain_error("operator term factor site out of range");
      if (i > 0 && site <= t.factors[i - 1].first)
        throw domain_error("operator term factors must have strictly increasing sites");
      if (op.rows() != phys_dims[site] || op.cols() != phys_dims[site])
        throw domain_error("operator term factor has wrong local dimension");
    }
  }

  // carrier channels per interior bond: bond b sits between sites b and b+1
  const int n_bonds = n_sites - 1;
  std::vector<std::vector<int>> carrier(terms.size(), std::vector<int>(std::max(n_bonds, 0), -1));
  std::vector<int> bond_dim(std::max(n_bonds, 0), 2);  // start + done
  for (std::size_t ti = 0; ti < terms.size(); ++ti) {
    const int first = terms[ti].factors.front().first;
    const int last = terms[ti].factors.back().first;
    for (int b = first; b < last; ++b) carrier[ti][b] = bond_dim[b]++;
  }

  OperatorTrain train;
  train.sites.resize(n_sites);
  std::vector<std::map<std::pair<int, int>, Matrix>> acc(n_sites);

  auto start_idx = [&](int bond) { return 0; };                 // absent on the right boundary
  auto done_idx = [&](int bond) { return bond == n_bonds ? 0 : 1; };  // right boundary bond is 1-dim
  (void)start_idx;

  const bool single_site_chain = n_sites == 1;
  for (int k = 0; k < n_sites; ++k) {
    const int d = phys_dims[k];
    MpoSite& w = train.sites[k];
    w.d = d;
    w.wl = k == 0 ? 1 : bond_dim[k - 1];
    w.wr = k == n_sites - 1 ? 1 : bond_dim[k];
    const Matrix id = Matrix::Identity(d, d);
    // pass-throughs where both endpoint channels exist
    if (k > 0 && k < n_sites - 1) acc[k][{0, 0}] += id;                       // start → start
    if (k > 0 && k < n_sites - 1) acc[k][{1, 1}] += id;                       // done → done
    if (k == 0 && n_sites > 1) { /* start enters from the boundary */ }
    if (k == n_sites - 1 && n_sites > 1) acc[k][{1, 0}] += id;                // done → boundary
    (void)single_site_chain;
  }

  for (std::size_t ti = 0; ti < terms.size(); ++ti) {
    const OpTerm& term = terms[ti];
    const int first = term.factors.front().first;
    const int last = term.factors.back().first;
    std::size_t fi = 0;
    for (int k = first; k <= last; ++k) {
      const int d = phys_dims[k];
      Matrix op = Matrix::Identity(d, d);
      if (fi < term.factors.size() && term.factors[fi].first == k) op = term.factors[fi++].second;
      if (k == first) op *= term.coeff;

      const int in = k == first ? 0 : carrier[ti][k - 1];
      int out;
      if (k == last)
        out = done_idx(k == n_sites - 1 ? n_bonds : k);
      else
        out = carrier[ti][k];
      acc[k][{in, out}] += op;
    }
  }

  for (int k = 0; k < n_sites; ++k) {
    for (auto& [key, op] : acc[k]) {
      if (op.cwiseAbs().maxCoeff() == 0.0) continue;
      train.sites[k].blocks.push_back({key.first, key.second, std::move(op)});
    }
  }
  return train;
}

OperatorTrain identity_train(const std::vector<int>& phys_dims) {
  OpTerm t;
  t.factors.emplace_back(0, Matrix::Identity(phys_dims[0], phys_dims[0]));
  t.provenance = "identity";
  return operator_train_from_terms(phys_dims, {t});
}

TensorTrainState apply_operator(const TensorTrainState& state, const OperatorTrain& op,
                                const TruncationPolicy& policy) {
  policy.validate();
  if (state.phys_dims() != op.phys_dims()) throw domain_error("apply_operator: layout mismatch");

  TensorTrainState out;
  out.log_norm = state.log_norm;
  out.truncation_budget = state.truncation_budget;
  out.compression_warning = state.compression_warning;
  out.tensors.reserve(state.size());

  // exact local application: bond dimensions multiply by the operator bonds
  for (int k = 0; k < state.size(); ++k) {
    const SiteTensor& a = state.tensors[k];
    const MpoSite& w = op.sites[k];
    SiteTensor n(a.dl * w.wl, a.d, a.dr * w.wr);
    for (const MpoBlock& blk : w.blocks) {
      for (int p = 0; p < a.d; ++p) {
        auto dst = n.phys_slice(p);
        for (int q = 0; q < a.d; ++q) {
          const cplx c = blk.op(p, q);
          if (c == cplx(0.0, 0.0)) continue;
          dst.block(static_cast<Eigen::Index>(a.dl) * blk.wl,
                    static_cast<Eigen::Index>(a.dr) * blk.wr, a.dl, a.dr) += c * a.phys_slice(q);
        }
      }
    }
    out.tensors.push_back(std::move(n));
  }

  // sweep 1: left → right QR (no truncation)
  out.ortho_center = 0;
  for (int k = 0; k + 1 < out.size(); ++k) shift_center_right(out, k);
  out.ortho_center = out.size() - 1;

  // sweep 2: right → left SVD truncation
  for (int k = out.size() - 1; k > 0; --k) {
    SiteTensor& a = out.tensors[k];
    SvdSplit split = svd_truncate(a.right_mat(), policy);
    out.truncation_budget += split.discarded;
    if (split.cap_forced && split.discarded > 100.0 * policy.svd_cutoff)
      out.compression_warning = true;
    const int keep = static_cast<int>(split.s.size());
    SiteTensor right(keep, a.d, a.dr);
    right.right_mat() = split.v.adjoint();
    SiteTensor& b = out.tensors[k - 1];
    SiteTensor left(b.dl, b.d, keep);
    left.left_mat() = b.left_mat() * (split.u * split.s.asDiagonal());
    a = std::move(right);
    b = std::move(left);
  }
  out.ortho_center = 0;

  const double nrm = out.tensors[0].data.norm();
  if (nrm > 0.0) {
    out.tensors[0].data /= nrm;
    out.log_norm += std::log(nrm);
  }
  return out;
}

Vector state_to_dense(const TensorTrainState& state) {
  Matrix m = Matrix::Ones(1, 1);
  for (const SiteTensor& a : state.tensors) {
    Matrix next = Matrix::Zero(m.rows() * a.d, a.dr);
    for (int p = 0; p < a.d; ++p)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        next.row(i * a.d + p) += m.row(i) * Matrix(a.phys_slice(p));
    m = std::move(next);
  }
  return std::exp(state.log_norm) * Vector(m.col(0));
}

Matrix operator_to_dense(const OperatorTrain& op) {
  std::vector<Matrix> acc(1, Matrix::Ones(1, 1));
  for (const MpoSite& w : op.sites) {
    std::vector<Matrix> next(w.wr);
    for (const MpoBlock& blk : w.blocks) {
      Matrix contrib = kron(acc[blk.wl], blk.op);
      if (next[blk.wr].size() == 0)
        next[blk.wr] = std::move(contrib);
      else
        next[blk.wr] += contrib;
    }
    const Eigen::Index dim = acc[0].rows() * w.d;
    for (auto& m : next)
      if (m.size() == 0) m = Matrix::Zero(dim, dim);
    acc = std::move(next);
  }
  return acc[0];
}

std::size_t total_dense_dim(const std::vector<int>& phys_dims) {
  std::size_t n = 1;
  for (int d : phys_dims) n *= static_cast<std::size_t>(d);
  return n;
}

OperatorTrain operator_from_dense(const std::vector<int>& phys_dims, const Matrix& dense,
                                  double cutoff) {
  const int n_sites = static_cast<int>(phys_dims.size());
  const std::size_t dim = total_dense_dim(phys_dims);
  if (static_cast<std::size_t>(dense.rows()) != dim || static_cast<std::size_t>(dense.cols()) != dim)
    throw domain_error("operator_from_dense: dimension mismatch");

  // strides with site 0 most significant
  std::vector<std::size_t> stride(n_sites, 1);
  for (int k = n_sites - 2; k >= 0; --k) stride[k] = stride[k + 1] * phys_dims[k + 1];

  // permuted matrix: rows (p0 q0), cols big-endian (p1 q1)(p2 q2)...
  auto rest_dim = [&](int from) {
    std::size_t r = 1;
    for (int k = from; k < n_sites; ++k) r *= static_cast<std::size_t>(phys_dims[k]) * phys_dims[k];
    return r;
  };

  const int d0 = phys_dims[0];
  Matrix cur(static_cast<Eigen::Index>(d0) * d0, rest_dim(1));
  std::vector<int> p(n_sites), q(n_sites);
  for (std::size_t row = 0; row < dim; ++row) {
    std::size_t rr = row;
    for (int k = 0; k < n_sites; ++k) { p[k] = static_cast<int>(rr / stride[k]); rr %= stride[k]; }
    for (std::size_t col = 0; col < dim; ++col) {
      std::size_t cc = col;
      for (int k = 0; k < n_sites; ++k) { q[k] = static_cast<int>(cc / stride[k]); cc %= stride[k]; }
      std::size_t rest = 0;
      for (int k = 1; k < n_sites; ++k)
        rest = rest * (static_cast<std::size_t>(phys_dims[k]) * phys_dims[k]) +
               static_cast<std::size_t>(p[k]) * phys_dims[k] + q[k];
      cur(p[0] * d0 + q[0], rest) = dense(row, col);
    }
  }

  OperatorTrain train;
  train.sites.resize(n_sites);
  int left_rank = 1;
  for (int k = 0; k < n_sites; ++k) {
    const int d = phys_dims[k];
    MpoSite& w = train.sites[k];
    w.d = d;
    w.wl = left_rank;
    if (k == n_sites - 1) {
      w.wr = 1;
      for (int c = 0; c < left_rank; ++c) {
        Matrix op(d, d);
        for (int pp = 0; pp < d; ++pp)
          for (int qq = 0; qq < d; ++qq) op(pp, qq) = cur(c + static_cast<Eigen::Index>(left_rank) * (pp * d + qq), 0);
        if (op.cwiseAbs().maxCoeff() > 0.0) w.blocks.push_back({c, 0, std::move(op)});
      }
      break;
    }

    // rows of cur are (left_rank, p k q k) with channel fastest
    Eigen::BDCSVD<Matrix> svd(cur, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    int keep = 0;
    const double smax = s.size() ? s[0] : 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > cutoff * std::max(smax, 1.0)) ++keep;
    keep = std::max(keep, 1);

    const Matrix u = svd.matrixU().leftCols(keep);
    w.wr = keep;
    for (int c_in = 0; c_in < left_rank; ++c_in) {
      for (int c_out = 0; c_out < keep; ++c_out) {
        Matrix op(d, d);
        for (int pp = 0; pp < d; ++pp)
          for (int qq = 0; qq < d; ++qq)
            op(pp, qq) = u(c_in + static_cast<Eigen::Index>(left_rank) * (pp * d + qq), c_out);
        if (op.cwiseAbs().maxCoeff() > 1e-300) w.blocks.push_back({c_in, c_out, std::move(op)});
      }
    }

    // carry S V† and expose the next site's (p q) as the slow part of the rows
    Matrix carry = s.head(keep).asDiagonal() * Matrix(svd.matrixV().leftCols(keep).adjoint());
    const int dn = phys_dims[k + 1];
    const std::size_t rest_next = rest_dim(k + 2);
    Matrix next(static_cast<Eigen::Index>(keep) * dn * dn, rest_next);
    for (int c = 0; c < keep; ++c)
      for (int pq = 0; pq < dn * dn; ++pq)
        for (std::size_t r = 0; r < rest_next; ++r)
          next(c + static_cast<Eigen::Index>(keep) * pq, r) =
              carry(c, static_cast<Eigen::Index>(pq) * rest_next + r);
    cur = std::move(next);
    left_rank = keep;
  }
  return train;
}

}  // namespace qhf
