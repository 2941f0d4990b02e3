#include "compop/numerics/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "compop/error.hpp"
#include "compop/numerics/linalg.hpp"

namespace compop::numerics {

double QuadratureScheme::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
  return s;
}

namespace {

// Orthonormal polynomials of a symmetric Jacobi matrix (zero diagonal):
//   beta_{k+1} p_{k+1} = x p_k - beta_k p_{k-1},  p_0 = mu0^{-1/2}.
// beta(k) returns beta_k for k >= 1.
struct OrthonormalRecurrence {
  std::function<double(int)> beta;
  double mu0;

  // Returns (p_n(x), p_n'(x), sum_{j<n} p_j(x)^2).
  void evaluate(int n, double x, double& pn, double& dpn, double& christoffel) const {
    double p_prev = 0.0, dp_prev = 0.0;
    double p = 1.0 / std::sqrt(mu0), dp = 0.0;
    christoffel = 0.0;
    for (int k = 0; k < n; ++k) {
      christoffel += p * p;
      const double bk = k == 0 ? 0.0 : beta(k);
      const double bk1 = beta(k + 1);
      const double p_next = (x * p - bk * p_prev) / bk1;
      const double dp_next = (p + x * dp - bk * dp_prev) / bk1;
      p_prev = p;
      dp_prev = dp;
      p = p_next;
      dp = dp_next;
    }
    pn = p;
    dpn = dp;
  }
};

// Nodes from the Jacobi-matrix eigenvalues, then one Newton polish on p_n and
// weights 1 / sum_j p_j(x_k)^2, which equals mu0 * (first eigenvector
// component)^2 with full relative accuracy at the extreme nodes.
void golub_welsch(int n, const OrthonormalRecurrence& rec, std::vector<double>& nodes,
                  std::vector<double>& weights) {
  Matrix<double> jac(n, n);
  for (int k = 1; k < n; ++k) {
    jac(k - 1, k) = rec.beta(k);
    jac(k, k - 1) = rec.beta(k);
  }
  const auto eig = sym_eig(jac);
  nodes = eig.values;
  weights.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double x = nodes[k];
    double pn = 0, dpn = 0, chr = 0;
    for (int it = 0; it < 3; ++it) {
      rec.evaluate(n, x, pn, dpn, chr);
      if (dpn == 0.0) break;
      const double step = pn / dpn;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rec.evaluate(n, x, pn, dpn, chr);
    nodes[k] = x;
    weights[k] = 1.0 / chr;
  }
  // Symmetrize: both weights are even, so enforce exact node symmetry.
  for (int k = 0; k < n / 2; ++k) {
    const double x = 0.5 * (nodes[n - 1 - k] - nodes[k]);
    const double w = 0.5 * (weights[k] + weights[n - 1 - k]);
    nodes[k] = -x;
    nodes[n - 1 - k] = x;
    weights[k] = w;
    weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

}  // namespace

QuadratureScheme gauss_hermite_nodes(int n) {
  if (n < 1 || n > 200) throw SizeError("gauss_hermite_nodes: n must be in [1, 200]");
  QuadratureScheme q;
  q.kind = QuadratureKind::GaussHermite;
  q.node_count = n;
  const OrthonormalRecurrence rec{[](int k) { return std::sqrt(0.5 * k); },
                                  std::sqrt(std::numbers::pi)};
  golub_welsch(n, rec, q.nodes, q.weights);
  return q;
}

QuadratureScheme gauss_legendre_nodes(int n, double lo, double hi) {
  if (n < 1 || n > 200) throw SizeError("gauss_legendre_nodes: n must be in [1, 200]");
  if (!(hi > lo)) throw DomainError("gauss_legendre_nodes: empty interval");
  QuadratureScheme q;
  q.kind = QuadratureKind::GaussLegendre;
  q.node_count = n;
  q.lo = lo;
  q.hi = hi;
  const OrthonormalRecurrence rec{
      [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0};
  golub_welsch(n, rec, q.nodes, q.weights);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int k = 0; k < n; ++k) {
    q.nodes[k] = mid + half * q.nodes[k];
    q.weights[k] *= half;
  }
  return q;
}

QuadratureScheme trapezoid_scheme(double lo, double hi, int panels, int levels) {
  if (!(hi > lo)) throw DomainError("trapezoid_scheme: empty interval");
  if (panels < 1 || levels < 1 || levels > 20)
    throw SizeError("trapezoid_scheme: panels >= 1 and 1 <= levels <= 20 required");
  const long finest = static_cast<long>(panels) << (levels - 1);
  if (finest > (1L << 24)) throw SizeError("trapezoid_scheme: too many panels");

  // Weight vector of the trapezoid rule with panels * 2^k panels, expressed
  // on the finest grid.
  auto trapezoid_weights = [&](int k) {
    std::vector<double> w(finest + 1, 0.0);
    const long stride = 1L << (levels - 1 - k);
    const double h = (hi - lo) / (static_cast<double>(panels) * (1L << k));
    for (long i = 0; i <= finest; i += stride) w[i] = h;
    w[0] *= 0.5;
    w[finest] *= 0.5;
    return w;
  };

  std::vector<std::vector<double>> table;
  for (int k = 0; k < levels; ++k) table.push_back(trapezoid_weights(k));
  // Romberg: R(k, j) = R(k, j-1) + (R(k, j-1) - R(k-1, j-1)) / (4^j - 1)
  for (int j = 1; j < levels; ++j) {
    const double f = std::pow(4.0, j) - 1.0;
    for (int k = levels - 1; k >= j; --k)
      for (long i = 0; i <= finest; ++i)
        table[k][i] += (table[k][i] - table[k - 1][i]) / f;
  }

  QuadratureScheme q;
  q.kind = QuadratureKind::Trapezoid;
  q.lo = lo;
  q.hi = hi;
  q.panels = panels;
  q.levels = levels;
  q.node_count = static_cast<int>(finest + 1);
  q.nodes.resize(finest + 1);
  q.weights = table[levels - 1];
  for (long i = 0; i <= finest; ++i)
    q.nodes[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(finest);
  q.nodes[finest] = hi;
  return q;
}

}  // namespace compop::numerics
