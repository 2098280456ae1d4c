#include "qhf/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "qhf/krylov.hpp"

namespace qhf::oracle {

namespace {

double coth_half(double beta, double omega) {
  if (std::isinf(beta)) return 1.0;
  return 1.0 + 2.0 / std::expm1(beta * omega);
}

double ohmic_j(double alpha, double omega_c, double w) {
  return 2.0 * alpha * w * std::exp(-w / omega_c);
}

template <class F>
double integrate(F f, double a, double b) {
  double error = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 15, 1e-10, &error);
  if (!(std::abs(error) <= 1e-6 * (std::abs(val) + 1.0)))
    throw numerics_error("oracle quadrature failed to converge");
  return val;
}

}  // namespace

double ib_mean(double alpha, double omega_c, double t) {
  if (t < 0.0) throw domain_error("t must be >= 0");
  const double x = omega_c * t;
  return alpha * omega_c * x * x / (1.0 + x * x);
}

double ib_variance(double alpha, double omega_c, double beta, double t) {
  if (t < 0.0) throw domain_error("t must be >= 0");
  if (t == 0.0) return 0.0;
  auto f = [=](double w) {
    return 0.5 * ohmic_j(alpha, omega_c, w) * (1.0 - std::cos(w * t)) * coth_half(beta, w);
  };
  return integrate(f, 0.0, 40.0 * omega_c);
}

cplx ib_log_char(double alpha, double omega_c, double beta, double lambda, double t) {
  if (t == 0.0 || lambda == 0.0) return {0.0, 0.0};
  auto fre = [=](double w) {
    return -0.5 * ohmic_j(alpha, omega_c, w) / (w * w) * (1.0 - std::cos(w * t)) *
           (1.0 - std::cos(w * lambda)) * coth_half(beta, w);
  };
  auto fim = [=](double w) {
    return 0.5 * ohmic_j(alpha, omega_c, w) / (w * w) * (1.0 - std::cos(w * t)) *
           std::sin(w * lambda);
  };
  return {integrate(fre, 0.0, 40.0 * omega_c), integrate(fim, 0.0, 40.0 * omega_c)};
}

// ---------------------------------------------------------------------------
// dense machinery
// ---------------------------------------------------------------------------

namespace {

using SparseM = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

struct SiteBasis {
  std::vector<int> dims;
  std::vector<std::size_t> stride;  // site 0 most significant

  explicit SiteBasis(std::vector<int> d) : dims(std::move(d)) {
    stride.assign(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
      stride[k] = stride[k + 1] * dims[k + 1];
  }
  std::size_t dim() const { return dims.empty() ? 1 : stride[0] * dims[0]; }
  int digit(std::size_t idx, int site) const {
    return static_cast<int>(idx / stride[site] % dims[site]);
  }
  std::size_t replace(std::size_t idx, int site, int from, int to) const {
    return idx + (static_cast<std::size_t>(to) - from) * stride[site];
  }
};

struct DenseTerm {
  cplx coeff;
  std::vector<std::pair<int, Matrix>> factors;
};

SparseM sparse_from_terms(const SiteBasis& basis, const std::vector<DenseTerm>& terms) {
  const std::size_t dim = basis.dim();
  std::vector<Triplet> trip;
  for (const DenseTerm& term : terms) {
    for (std::size_t col = 0; col < dim; ++col) {
      // expand the product of per-site columns
      std::vector<std::pair<std::size_t, cplx>> partial{{col, term.coeff}};
      for (const auto& [site, op] : term.factors) {
        std::vector<std::pair<std::size_t, cplx>> next;
        const int q = basis.digit(col, site);
        for (const auto& [idx, amp] : partial) {
          for (int p = 0; p < basis.dims[site]; ++p) {
            const cplx v = op(p, q);
            if (v == cplx(0.0, 0.0)) continue;
            next.emplace_back(basis.replace(idx, site, q, p), amp * v);
          }
        }
        partial = std::move(next);
      }
      for (const auto& [row, amp] : partial) trip.emplace_back(row, col, amp);
    }
  }
  SparseM m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// e^{-iHt} v by Krylov, splitting t recursively until converged
Vector krylov_propagate(const SparseM& h, Vector v, double t, int depth = 0) {
  if (t == 0.0) return v;
  auto matvec = [&](const Eigen::Ref<const Vector>& in, Vector& out) { out.noalias() = h * in; };
  try {
    return lanczos_exp(matvec, v, cplx(0.0, -t), 1e-13, 120);
  } catch (const numerics_error&) {
    if (depth > 24) throw;
    v = krylov_propagate(h, std::move(v), 0.5 * t, depth + 1);
    return krylov_propagate(h, std::move(v), 0.5 * t, depth + 1);
  }
}

Matrix spin_hamiltonian(double epsilon0, double delta) {
  return epsilon0 * spin_sz() + delta * spin_sx();
}

constexpr std::size_t dense_cap = 4096;

}  // namespace

int DenseModel::thermal_dim(double beta, double freq, double tail) {
  if (std::isinf(beta)) return 1;
  const double q = std::exp(-beta * freq);
  return std::max(1, static_cast<int>(std::ceil(std::log(tail) / std::log(q))) + 1);
}

int DenseModel::displaced_dim(double amplitude) {
  // smallest Fock cut with Poisson(|α|²) tail below 1e−12, plus margin
  const double lam = std::max(amplitude * amplitude, 1e-6);
  double term = std::exp(-lam), cum = term;
  int k = 0;
  while (1.0 - cum > 1e-12 && k < 400) {
    ++k;
    term *= lam / k;
    cum += term;
  }
  return k + 3;
}

void DenseModel::validate_tpm() const {
  if (modes.empty()) throw domain_error("DenseModel needs at least one mode");
  if (mode_dims.size() != modes.size()) throw domain_error("mode_dims size mismatch");
  std::size_t dim = 2;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    dim *= static_cast<std::size_t>(mode_dims[k]);
    if (!std::isinf(beta)) {
      const double tail = std::exp(-beta * modes[k].freq * mode_dims[k]);
      if (tail > 1e-10)
        throw domain_error("local truncation d insufficient for mode " + std::to_string(k) +
                           "; need d >= " + std::to_string(thermal_dim(beta, modes[k].freq, 1e-10)));
    }
  }
  if (dim > dense_cap) throw domain_error("dense TPM dimension exceeds the 4096 cap");
}

void DenseModel::validate_doubled() const {
  if (dims_o.size() != modes.size()) throw domain_error("dims_o size mismatch");
  if (!std::isinf(beta) && dims_a.size() != modes.size())
    throw domain_error("dims_a size mismatch");
  std::size_t dim = 2;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    dim *= static_cast<std::size_t>(dims_o[k]);
    if (!std::isinf(beta)) dim *= static_cast<std::size_t>(dims_a[k]);
  }
  if (dim > dense_cap) throw domain_error("dense doubled dimension exceeds the 4096 cap");
}

namespace {

// thermal occupation-basis bookkeeping; propagation is per-branch sparse
// Krylov, so only bath basis states with non-negligible thermal weight are
// ever touched (dropped mass < 1e−14, far below the oracle tolerances)
struct TpmSetup {
  SiteBasis basis;  // spin ⊗ modes
  std::size_t bath_dim;
  Eigen::VectorXd bath_energy;  // per bath basis state
  Eigen::VectorXd bath_prob;    // truncated geometric products, renormalized
  SparseM h;

  static constexpr double branch_cutoff = 1e-14;

  explicit TpmSetup(const DenseModel& m) : basis(make_dims(m)) {
    const int n_modes = static_cast<int>(m.modes.size());
    bath_dim = 1;
    for (int k = 0; k < n_modes; ++k) bath_dim *= static_cast<std::size_t>(m.mode_dims[k]);

    bath_energy.setZero(bath_dim);
    for (std::size_t b = 0; b < bath_dim; ++b) {
      std::size_t rest = b;
      for (int k = n_modes - 1; k >= 0; --k) {
        const int n = static_cast<int>(rest % m.mode_dims[k]);
        rest /= m.mode_dims[k];
        bath_energy[b] += n * m.modes[k].freq;
      }
    }
    bath_prob.setOnes(bath_dim);
    if (std::isinf(m.beta)) {
      bath_prob.setZero();
      bath_prob[0] = 1.0;
    } else {
      for (std::size_t b = 0; b < bath_dim; ++b)
        bath_prob[b] = std::exp(-m.beta * bath_energy[b]);
      bath_prob /= bath_prob.sum();
    }

    std::vector<DenseTerm> terms;
    terms.push_back({1.0, {{0, spin_hamiltonian(m.epsilon0, m.delta)}}});
    for (int k = 0; k < n_modes; ++k) {
      const int d = m.mode_dims[k];
      Matrix nop = Matrix::Zero(d, d);
      for (int j = 0; j < d; ++j) nop(j, j) = j;
      Matrix x = Matrix::Zero(d, d);
      for (int j = 1; j < d; ++j) x(j - 1, j) = x(j, j - 1) = std::sqrt(static_cast<double>(j));
      terms.push_back({m.modes[k].freq, {{k + 1, nop}}});
      terms.push_back({m.modes[k].coupling, {{0, spin_sx()}, {k + 1, x}}});
    }
    h = sparse_from_terms(basis, terms);
  }

  static std::vector<int> make_dims(const DenseModel& m) {
    std::vector<int> dims{2};
    dims.insert(dims.end(), m.mode_dims.begin(), m.mode_dims.end());
    return dims;
  }

  // calls f(pb, b, psi_b(t)) for every thermally occupied bath basis state
  template <class F>
  void for_each_branch(const DenseModel& m, double t, F f) const {
    for (const SpinBranch& branch : m.spin) {
      if (branch.weight <= 0.0) continue;
      for (std::size_t b = 0; b < bath_dim; ++b) {
        const double pb = bath_prob[b] * branch.weight;
        if (pb < branch_cutoff) continue;
        Vector psi0 = Vector::Zero(basis.dim());
        psi0[b] = branch.state[0];  // spin digit is most significant
        psi0[bath_dim + b] = branch.state[1];
        f(pb, b, krylov_propagate(h, std::move(psi0), t));
      }
    }
  }
};

}  // namespace

std::vector<double> dense_tpm_moments(const DenseModel& m, double t, int n_max) {
  m.validate_tpm();
  TpmSetup setup(m);
  std::vector<double> moments(n_max, 0.0);
  setup.for_each_branch(m, t, [&](double pb, std::size_t b, const Vector& psi_t) {
    for (Eigen::Index i = 0; i < psi_t.size(); ++i) {
      const double amp2 = std::norm(psi_t[i]);
      if (amp2 == 0.0) continue;
      const double de = setup.bath_energy[i % setup.bath_dim] - setup.bath_energy[b];
      double power = 1.0;
      for (int n = 0; n < n_max; ++n) {
        power *= de;
        moments[n] += pb * amp2 * power;
      }
    }
  });
  return moments;
}

double dense_tpm_mean_via_energy_change(const DenseModel& m, double t) {
  m.validate_tpm();
  TpmSetup setup(m);
  double mean = 0.0;
  setup.for_each_branch(m, t, [&](double pb, std::size_t b, const Vector& psi_t) {
    double e_final = 0.0;
    for (Eigen::Index i = 0; i < psi_t.size(); ++i)
      e_final += std::norm(psi_t[i]) * setup.bath_energy[i % setup.bath_dim];
    mean += pb * (e_final - setup.bath_energy[b]);
  });
  return mean;
}

cplx dense_tpm_char(const DenseModel& m, double lambda, double t) {
  m.validate_tpm();
  TpmSetup setup(m);
  cplx chi{0.0, 0.0};
  setup.for_each_branch(m, t, [&](double pb, std::size_t b, const Vector& psi_t) {
    for (Eigen::Index i = 0; i < psi_t.size(); ++i) {
      const double amp2 = std::norm(psi_t[i]);
      if (amp2 == 0.0) continue;
      const double de = setup.bath_energy[i % setup.bath_dim] - setup.bath_energy[b];
      chi += pb * amp2 * std::exp(cplx(0.0, lambda * de));
    }
  });
  return chi;
}

std::vector<double> dense_heat_operator_moments(const DenseModel& m, double t, int n_max) {
  m.validate_doubled();
  const bool zero_t = std::isinf(m.beta);
  const int n_modes = static_cast<int>(m.modes.size());

  std::vector<int> dims{2};
  for (int k = 0; k < n_modes; ++k) {
    dims.push_back(m.dims_o[k]);
    if (!zero_t) dims.push_back(m.dims_a[k]);
  }
  SiteBasis basis(dims);

  std::vector<DenseTerm> terms;
  terms.push_back({1.0, {{0, spin_hamiltonian(m.epsilon0, m.delta)}}});
  Eigen::VectorXd q_diag = Eigen::VectorXd::Zero(basis.dim());
  int site = 1;
  for (int k = 0; k < n_modes; ++k) {
    double u = 1.0, v = 0.0;
    if (!zero_t) {
      const double n = 1.0 / std::expm1(m.beta * m.modes[k].freq);
      u = std::sqrt(1.0 + n);
      v = std::sqrt(n);
    }
    for (int copy = 0; copy < (zero_t ? 1 : 2); ++copy) {
      const bool aux = copy == 1;
      const int d = dims[site];
      Matrix nop = Matrix::Zero(d, d);
      for (int j = 0; j < d; ++j) nop(j, j) = j;
      Matrix x = Matrix::Zero(d, d);
      for (int j = 1; j < d; ++j) x(j - 1, j) = x(j, j - 1) = std::sqrt(static_cast<double>(j));
      const double sign = aux ? -1.0 : 1.0;
      terms.push_back({sign * m.modes[k].freq, {{site, nop}}});
      terms.push_back({(aux ? v : u) * m.modes[k].coupling, {{0, spin_sx()}, {site, x}}});
      for (std::size_t idx = 0; idx < basis.dim(); ++idx)
        q_diag[idx] += sign * m.modes[k].freq * basis.digit(idx, site);
      ++site;
    }
  }
  const SparseM h = sparse_from_terms(basis, terms);

  std::vector<double> moments(n_max, 0.0);
  for (const SpinBranch& branch : m.spin) {
    if (branch.weight <= 0.0) continue;
    Vector psi0 = Vector::Zero(basis.dim());
    psi0[0] = branch.state[0];
    psi0[basis.stride[0]] = branch.state[1];
    const Vector psi_t = krylov_propagate(h, psi0, t);
    for (Eigen::Index i = 0; i < psi_t.size(); ++i) {
      const double amp2 = std::norm(psi_t[i]);
      if (amp2 == 0.0) continue;
      double power = 1.0;
      for (int n = 0; n < n_max; ++n) {
        power *= q_diag[i];
        moments[n] += branch.weight * amp2 * power;
      }
    }
  }
  return moments;
}

// ---------------------------------------------------------------------------
// dense chain-layout simulator
// ---------------------------------------------------------------------------

namespace {

std::vector<DenseTerm> chain_layout_terms(const SpinBosonParams& params,
                                          const std::vector<BathChains>& chains,
                                          const LayoutPlan& layout, bool include_system,
                                          int which_bath) {
  const auto dims = layout.phys_dims();
  std::vector<DenseTerm> terms;
  if (include_system) {
    terms.push_back({1.0, {{layout.system_site, spin_hamiltonian(params.epsilon0, params.delta)}}});
  }

  for (int b = 0; b < static_cast<int>(chains.size()); ++b) {
    if (!include_system && which_bath >= 0 && b != which_bath) continue;
    double q_sign = 1.0;
    if (!include_system && which_bath == -1) q_sign = b == 1 ? 1.0 : -1.0;  // Δ̃_Q = Q̃₂ − Q̃₁

    auto add_chain = [&](const ChainCoefficients& chain, bool aux) {
      const double sign = (aux ? -1.0 : 1.0) * q_sign;
      for (int n = 0; n < chain.length(); ++n) {
        const int site = layout.chain_site(b, aux, n);
        const int d = dims[site];
        Matrix nop = Matrix::Zero(d, d);
        for (int j = 0; j < d; ++j) nop(j, j) = j;
        terms.push_back({sign * chain.site_freqs[n], {{site, nop}}});
        if (n + 1 < chain.length()) {
          const int next = layout.chain_site(b, aux, n + 1);
          const int lo = std::min(site, next), hi = std::max(site, next);
          Matrix a_lo = Matrix::Zero(dims[lo], dims[lo]);
          for (int j = 1; j < dims[lo]; ++j) a_lo(j - 1, j) = std::sqrt(static_cast<double>(j));
          Matrix a_hi = Matrix::Zero(dims[hi], dims[hi]);
          for (int j = 1; j < dims[hi]; ++j) a_hi(j - 1, j) = std::sqrt(static_cast<double>(j));
          terms.push_back({sign * chain.hoppings[n],
                           {{lo, Matrix(a_lo.adjoint())}, {hi, a_hi}}});
          terms.push_back({sign * chain.hoppings[n], {{lo, a_lo}, {hi, Matrix(a_hi.adjoint())}}});
        }
      }
      if (include_system) {
        const int c0_site = layout.chain_site(b, aux, 0);
        Matrix x = Matrix::Zero(dims[c0_site], dims[c0_site]);
        for (int j = 1; j < dims[c0_site]; ++j)
          x(j - 1, j) = x(j, j - 1) = std::sqrt(static_cast<double>(j));
        const int lo = std::min(layout.system_site, c0_site);
        DenseTerm t;
        t.coeff = chain.c0;
        if (lo == layout.system_site)
          t.factors = {{layout.system_site, spin_sx()}, {c0_site, x}};
        else
          t.factors = {{c0_site, x}, {layout.system_site, spin_sx()}};
        terms.push_back(std::move(t));
      }
    };
    add_chain(chains[b].original, false);
    if (chains[b].auxiliary) add_chain(*chains[b].auxiliary, true);
  }
  return terms;
}

}  // namespace

Matrix dense_chain_hamiltonian(const SpinBosonParams& params,
                               const std::vector<BathChains>& chains, const LayoutPlan& layout) {
  SiteBasis basis(layout.phys_dims());
  if (basis.dim() > dense_cap) throw domain_error("dense chain dimension exceeds the 4096 cap");
  return Matrix(sparse_from_terms(basis, chain_layout_terms(params, chains, layout, true, -2)));
}

std::vector<std::vector<double>> dense_chain_heat_moments(
    const SpinBosonParams& params, const std::vector<BathChains>& chains,
    const LayoutPlan& layout, const Eigen::Vector2cd& spin, const std::vector<double>& times,
    int n_max, int which_bath) {
  SiteBasis basis(layout.phys_dims());
  if (basis.dim() > dense_cap) throw domain_error("dense chain dimension exceeds the 4096 cap");

  const SparseM h =
      sparse_from_terms(basis, chain_layout_terms(params, chains, layout, true, -2));
  const SparseM q =
      sparse_from_terms(basis, chain_layout_terms(params, chains, layout, false, which_bath));

  Vector psi = Vector::Zero(basis.dim());
  // product state: spin amplitudes at the system digit, vacuum elsewhere
  psi[0] = spin[0];
  psi[basis.stride[layout.system_site]] = spin[1];

  std::vector<std::vector<double>> out;
  double current_t = 0.0;
  for (double t : times) {
    psi = krylov_propagate(h, std::move(psi), t - current_t);
    current_t = t;
    std::vector<double> moments(n_max);
    Vector qpsi = psi;
    for (int n = 0; n < n_max; ++n) {
      qpsi = q * qpsi;
      moments[n] = std::real(psi.dot(qpsi));
    }
    out.push_back(std::move(moments));
  }
  return out;
}

}  // namespace qhf::oracle
