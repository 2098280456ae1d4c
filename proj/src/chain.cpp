#include "qhf/chain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <sstream>

namespace qhf {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double DiscretizedMeasure::total_mass() const {
  long double s = 0.0L;
  for (double w : weights) s += w;
  return static_cast<double>(s);
}

double ChainCoefficients::max_hopping() const {
  double m = 0.0;
  for (double t : hoppings) m = std::max(m, t);
  return m;
}

std::string ChainCoefficients::to_table() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# c0= " << c0 << " L= " << length() << "\n";
  os << "# n omega_n t_n\n";
  for (int n = 0; n < length(); ++n) {
    const double t = n + 1 < length() ? hoppings[n] : 0.0;
    os << n << " " << site_freqs[n] << " " << t << "\n";
  }
  return os.str();
}

ChainCoefficients ChainCoefficients::from_table(std::istream& in) {
  ChainCoefficients c;
  int expected_length = -1;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    if (line.rfind("#", 0) == 0) {
      std::string tok;
      while (ss >> tok) {
        if (tok == "c0=") ss >> c.c0;
        if (tok == "L=") ss >> expected_length;
      }
      continue;
    }
    int n;
    double w, t;
    if (ss >> n >> w >> t) {
      c.site_freqs.push_back(w);
      c.hoppings.push_back(t);
    }
  }
  if (!c.site_freqs.empty()) c.hoppings.pop_back();  // last t is a 0 placeholder
  if (expected_length >= 0 && expected_length != c.length())
    throw domain_error("chain table header L does not match row count");
  return c;
}

DiscretizedMeasure discretize_measure(const BathMeasure& measure, int num_nodes) {
  if (measure.is_zero) throw domain_error("empty measure");
  if (num_nodes < 4) throw domain_error("discretize_measure needs at least 4 nodes");
  const double omega_max = measure.omega_max;
  if (omega_max <= 0.0) throw domain_error("measure has empty support");

  constexpr int per_panel = 16;
  const int n_panels = std::max(1, num_nodes / per_panel);
  std::vector<double> gx, gw;
  gauss_legendre(per_panel, gx, gw);

  DiscretizedMeasure dm;
  dm.nodes.reserve(n_panels * per_panel);
  dm.weights.reserve(n_panels * per_panel);
  // quadratic panel grading refines toward ω = 0 where finite-T weights are steepest
  auto edge = [&](int k) {
    const double s = static_cast<double>(k) / n_panels;
    return omega_max * s * s;
  };
  for (int p = 0; p < n_panels; ++p) {
    const double a = edge(p), b = edge(p + 1);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < per_panel; ++i) {
      const double x = mid + half * gx[i];
      const double w = half * gw[i] * measure(x);
      if (w < 0.0) throw domain_error("measure is negative at omega = " + std::to_string(x));
      dm.nodes.push_back(x);
      dm.weights.push_back(w);
    }
  }
  if (dm.total_mass() <= 0.0) throw domain_error("empty measure");
  return dm;
}

ChainCoefficients stieltjes_recurrence(const DiscretizedMeasure& dm, int length) {
  const int n_nodes = static_cast<int>(dm.nodes.size());
  if (length < 1) throw domain_error("chain length must be >= 1");
  // quadrature-discretized measures keep a 4x stability margin; tiny atomic
  // measures (toy baths) may be mapped exactly up to their support size
  const int max_len = n_nodes >= 64 ? n_nodes / 4 : n_nodes;
  if (length > max_len)
    throw domain_error("chain length " + std::to_string(length) +
                       " exceeds the num_nodes/4 stability margin");

  // Running orthonormal polynomials q_k(x_i), extended-precision sums.
  std::vector<long double> x(dm.nodes.begin(), dm.nodes.end());
  std::vector<long double> w(dm.weights.begin(), dm.weights.end());
  long double mass = 0.0L;
  for (auto v : w) mass += v;
  if (mass <= 0.0L) throw domain_error("empty measure");

  std::vector<long double> q_prev(n_nodes, 0.0L), q(n_nodes), r(n_nodes);
  const long double inv_sqrt_mass = 1.0L / std::sqrt(mass);
  for (int i = 0; i < n_nodes; ++i) q[i] = inv_sqrt_mass;

  const auto [lo_it, hi_it] = std::minmax_element(dm.nodes.begin(), dm.nodes.end());
  const long double span = *hi_it - *lo_it;
  // below this the measure cannot support another orthogonal polynomial
  const long double b_floor = 1e-13L * span * span;

  ChainCoefficients out;
  out.c0 = static_cast<double>(std::sqrt(mass));
  out.site_freqs.resize(length);
  out.hoppings.resize(length - 1);

  long double sqrt_b_prev = 0.0L;
  for (int k = 0; k < length; ++k) {
    long double a = 0.0L;
    for (int i = 0; i < n_nodes; ++i) a += w[i] * x[i] * q[i] * q[i];
    out.site_freqs[k] = static_cast<double>(a);
    if (k == length - 1) break;

    long double b = 0.0L;
    for (int i = 0; i < n_nodes; ++i) {
      r[i] = (x[i] - a) * q[i] - sqrt_b_prev * q_prev[i];
      b += w[i] * r[i] * r[i];
    }
    if (!(b > b_floor))
      throw numerics_error("measure resolution exhausted at recurrence index " +
                           std::to_string(k + 1));
    const long double sb = std::sqrt(b);
    out.hoppings[k] = static_cast<double>(sb);
    for (int i = 0; i < n_nodes; ++i) {
      q_prev[i] = q[i];
      q[i] = r[i] / sb;
    }
    sqrt_b_prev = sb;
  }
  return out;
}

BathChains chain_coefficients(const BathSpec& bath, int length, int num_nodes) {
  if (length < 1) throw domain_error("chain length must be >= 1");
  if (num_nodes <= 0) num_nodes = std::max(4096, 16 * length);

  const ThermofieldMeasures tf = thermofield_split(bath);
  BathChains chains;
  chains.original = stieltjes_recurrence(discretize_measure(tf.original, num_nodes), length);
  if (!tf.auxiliary.is_zero) {
    chains.auxiliary =
        stieltjes_recurrence(discretize_measure(tf.auxiliary, num_nodes), length);
  }
  return chains;
}

int recommended_chain_length(const ChainCoefficients& chain, double t_max) {
  return static_cast<int>(std::ceil(2.0 * chain.max_hopping() * t_max)) + 1;
}

}  // namespace qhf
