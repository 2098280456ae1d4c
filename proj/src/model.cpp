#include "qhf/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qhf/tt_ops.hpp"

namespace qhf {

Matrix spin_sx() {
  Matrix sx(2, 2);
  sx << 0.0, 0.5, 0.5, 0.0;
  return sx;
}

Matrix spin_sz() {
  Matrix sz(2, 2);
  sz << 0.5, 0.0, 0.0, -0.5;
  return sz;
}

void SpinBosonParams::validate() const {
  if (initial_state.empty()) throw domain_error("initial spin state missing");
  double total = 0.0;
  for (const SpinBranch& b : initial_state) {
    if (b.weight < 0.0) throw domain_error("spin mixture weights must be non-negative");
    if (std::abs(b.state.norm() - 1.0) > 1e-10)
      throw domain_error("spin branch states must be normalized");
    total += b.weight;
  }
  if (std::abs(total - 1.0) > 1e-10) throw domain_error("spin mixture weights must sum to 1");
}

std::vector<SpinBranch> spin_state_named(const std::string& name) {
  const double s = 1.0 / std::sqrt(2.0);
  if (name == "plus_x") return {{1.0, {s, s}}};
  if (name == "minus_x") return {{1.0, {s, -s}}};
  if (name == "up_z") return {{1.0, {1.0, 0.0}}};
  if (name == "down_z") return {{1.0, {0.0, 1.0}}};
  if (name == "mixed") return {{0.5, {1.0, 0.0}}, {0.5, {0.0, 1.0}}};
  throw domain_error("unknown initial state '" + name +
                     "' (expected plus_x, minus_x, up_z, down_z, mixed, or bloch)");
}

std::vector<SpinBranch> spin_state_bloch(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r > 1.0 + 1e-12) throw domain_error("Bloch vector norm exceeds 1");
  if (r < 1e-14) return spin_state_named("mixed");
  // eigenvectors of r̂·σ: |+⟩ = (cos θ/2, e^{iφ} sin θ/2)
  const double theta = std::acos(std::clamp(z / r, -1.0, 1.0));
  const double phi = std::atan2(y, x);
  const cplx eip = std::exp(im_unit * phi);
  Eigen::Vector2cd up(std::cos(theta / 2), eip * std::sin(theta / 2));
  Eigen::Vector2cd dn(-std::sin(theta / 2), eip * std::cos(theta / 2));
  if (r > 1.0 - 1e-12) return {{1.0, up}};
  return {{(1.0 + r) / 2.0, up}, {(1.0 - r) / 2.0, dn}};
}

int LocalDims::chain_dim_at(int position, int chain_len) const {
  if (chain_near <= chain_min) return chain_near;
  int taper = taper_sites >= 0 ? taper_sites : std::max(1, chain_len / 2);
  if (taper == 0) return chain_near;
  const double frac = std::min(1.0, static_cast<double>(position) / taper);
  return std::max(chain_min, chain_near - static_cast<int>(std::floor((chain_near - chain_min) * frac)));
}

std::vector<int> LayoutPlan::phys_dims() const {
  std::vector<int> dims(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) dims[i] = sites[i].phys_dim;
  return dims;
}

int LayoutPlan::chain_site(int bath, bool auxiliary, int position) const {
  for (int i = 0; i < size(); ++i) {
    const LayoutSite& s = sites[i];
    if (s.role == LayoutSite::Role::chain && s.bath == bath && s.auxiliary == auxiliary &&
        s.position == position)
      return i;
  }
  return -1;
}

int LayoutPlan::chain_length(int bath, bool auxiliary) const {
  int n = 0;
  for (const LayoutSite& s : sites)
    if (s.role == LayoutSite::Role::chain && s.bath == bath && s.auxiliary == auxiliary) ++n;
  return n;
}

LayoutPlan plan_layout(const std::vector<ChainLengths>& chain_lengths, const LocalDims& dims) {
  const int n_baths = static_cast<int>(chain_lengths.size());
  if (n_baths < 1 || n_baths > 2) throw domain_error("plan_layout supports 1 or 2 baths");
  for (const ChainLengths& c : chain_lengths)
    if (c.original < 1) throw domain_error("original chain length must be >= 1");

  LayoutPlan plan;
  auto push_chain = [&](int bath, bool aux, int length, bool reversed) {
    for (int k = 0; k < length; ++k) {
      const int pos = reversed ? length - 1 - k : k;
      LayoutSite s;
      s.role = LayoutSite::Role::chain;
      s.bath = bath;
      s.auxiliary = aux;
      s.position = pos;
      s.phys_dim = dims.chain_dim_at(pos, length);
      plan.sites.push_back(s);
    }
  };
  auto push_system = [&] {
    LayoutSite s;
    s.role = LayoutSite::Role::system;
    s.phys_dim = dims.spin_dim;
    plan.system_site = static_cast<int>(plan.sites.size());
    plan.sites.push_back(s);
  };

  if (n_baths == 1) {
    push_chain(0, true, chain_lengths[0].auxiliary, /*reversed=*/true);
    push_system();
    push_chain(0, false, chain_lengths[0].original, /*reversed=*/false);
  } else {
    push_chain(0, true, chain_lengths[0].auxiliary, /*reversed=*/true);
    push_chain(0, false, chain_lengths[0].original, /*reversed=*/true);
    push_system();
    push_chain(1, false, chain_lengths[1].original, /*reversed=*/false);
    push_chain(1, true, chain_lengths[1].auxiliary, /*reversed=*/false);
  }
  return plan;
}

namespace {

// free chain Hamiltonian terms of one chain, with an overall sign
void append_chain_terms(std::vector<OpTerm>& terms, const LayoutPlan& layout, int bath, bool aux,
                        const ChainCoefficients& chain, double sign, const std::string& label) {
  const auto dims = layout.phys_dims();
  for (int n = 0; n < chain.length(); ++n) {
    const int site = layout.chain_site(bath, aux, n);
    if (site < 0) throw domain_error("layout is missing a chain site");
    OpTerm freq;
    freq.coeff = sign * chain.site_freqs[n];
    freq.factors.emplace_back(site, boson_number(dims[site]));
    freq.provenance = label + " site energy n=" + std::to_string(n);
    terms.push_back(std::move(freq));

    if (n + 1 < chain.length()) {
      const int next = layout.chain_site(bath, aux, n + 1);
      const int lo = std::min(site, next), hi = std::max(site, next);
      const Matrix a_lo = boson_annihilation(dims[lo]);
      const Matrix a_hi = boson_annihilation(dims[hi]);
      OpTerm hop1;
      hop1.coeff = sign * chain.hoppings[n];
      hop1.factors.emplace_back(lo, a_lo.adjoint());
      hop1.factors.emplace_back(hi, a_hi);
      hop1.provenance = label + " hop n=" + std::to_string(n);
      OpTerm hop2;
      hop2.coeff = sign * chain.hoppings[n];
      hop2.factors.emplace_back(lo, a_lo);
      hop2.factors.emplace_back(hi, a_hi.adjoint());
      hop2.provenance = label + " hop (h.c.) n=" + std::to_string(n);
      terms.push_back(std::move(hop1));
      terms.push_back(std::move(hop2));
    }
  }
}

void append_coupling_term(std::vector<OpTerm>& terms, const LayoutPlan& layout, int bath,
                          bool aux, double c0, const std::string& label) {
  const auto dims = layout.phys_dims();
  const int chain0 = layout.chain_site(bath, aux, 0);
  const int sys = layout.system_site;
  OpTerm t;
  t.coeff = c0;
  if (sys < chain0) {
    t.factors.emplace_back(sys, spin_sx());
    t.factors.emplace_back(chain0, boson_position_sum(dims[chain0]));
  } else {
    t.factors.emplace_back(chain0, boson_position_sum(dims[chain0]));
    t.factors.emplace_back(sys, spin_sx());
  }
  t.provenance = label;
  terms.push_back(std::move(t));
}

}  // namespace

HamiltonianTrain build_transformed_hamiltonian(const SpinBosonParams& params,
                                               const std::vector<BathChains>& chains,
                                               const LayoutPlan& layout) {
  params.validate();
  const int n_baths = static_cast<int>(chains.size());
  for (int b = 0; b < n_baths; ++b) {
    if (layout.chain_length(b, false) != chains[b].original.length())
      throw domain_error("layout/chain mismatch for bath " + std::to_string(b));
    const int aux_len = chains[b].auxiliary ? chains[b].auxiliary->length() : 0;
    if (layout.chain_length(b, true) != aux_len)
      throw domain_error("layout/auxiliary-chain mismatch for bath " + std::to_string(b));
  }

  std::vector<OpTerm> terms;
  const int sys = layout.system_site;
  if (params.epsilon0 != 0.0) {
    OpTerm t;
    t.coeff = params.epsilon0;
    t.factors.emplace_back(sys, spin_sz());
    t.provenance = "system level splitting";
    terms.push_back(std::move(t));
  }
  if (params.delta != 0.0) {
    OpTerm t;
    t.coeff = params.delta;
    t.factors.emplace_back(sys, spin_sx());
    t.provenance = "system tunneling";
    terms.push_back(std::move(t));
  }

  for (int b = 0; b < n_baths; ++b) {
    const std::string bl = "bath " + std::to_string(b + 1);
    append_chain_terms(terms, layout, b, false, chains[b].original, +1.0, bl + " original chain");
    append_coupling_term(terms, layout, b, false, chains[b].original.c0,
                         bl + " system-to-original coupling");
    if (chains[b].auxiliary) {
      // auxiliary free part is subtracted from the generator; its coupling enters positively
      append_chain_terms(terms, layout, b, true, *chains[b].auxiliary, -1.0,
                         bl + " auxiliary chain (negated)");
      append_coupling_term(terms, layout, b, true, chains[b].auxiliary->c0,
                           bl + " system-to-auxiliary coupling");
    }
  }

  HamiltonianTrain h;
  h.op = operator_train_from_terms(layout.phys_dims(), terms);
  h.terms = std::move(terms);
  return h;
}

std::string HamiltonianTrain::dump_terms() const {
  std::ostringstream os;
  for (const OpTerm& t : terms) {
    os << t.provenance << ": coeff " << std::real(t.coeff);
    for (const auto& [site, op] : t.factors) os << " [site " << site << "]";
    os << "\n";
  }
  return os.str();
}

HeatOperatorSpec build_heat_operator(const std::vector<BathChains>& chains,
                                     const LayoutPlan& layout) {
  HeatOperatorSpec spec;
  const int n_baths = static_cast<int>(chains.size());
  std::vector<std::vector<OpTerm>> bath_terms(n_baths);
  for (int b = 0; b < n_baths; ++b) {
    const std::string bl = "bath " + std::to_string(b + 1);
    append_chain_terms(bath_terms[b], layout, b, false, chains[b].original, +1.0,
                       bl + " heat: original chain energy");
    if (chains[b].auxiliary)
      append_chain_terms(bath_terms[b], layout, b, true, *chains[b].auxiliary, -1.0,
                         bl + " heat: auxiliary chain energy (subtracted)");
    spec.per_bath.push_back(operator_train_from_terms(layout.phys_dims(), bath_terms[b]));
  }
  if (n_baths == 2) {
    std::vector<OpTerm> delta_terms;
    for (OpTerm t : bath_terms[1]) delta_terms.push_back(std::move(t));
    for (OpTerm t : bath_terms[0]) {
      t.coeff = -t.coeff;
      delta_terms.push_back(std::move(t));
    }
    spec.delta = operator_train_from_terms(layout.phys_dims(), delta_terms);
  }
  return spec;
}

TensorTrainState initial_global_state(const LayoutPlan& layout, const Eigen::Vector2cd& spin) {
  std::vector<Vector> vecs;
  vecs.reserve(layout.sites.size());
  for (const LayoutSite& s : layout.sites) {
    Vector v = Vector::Zero(s.phys_dim);
    if (s.role == LayoutSite::Role::system) {
      v[0] = spin[0];
      v[1] = spin[1];
    } else {
      v[0] = 1.0;
    }
    vecs.push_back(std::move(v));
  }
  return product_state(vecs);
}

}  // namespace qhf
