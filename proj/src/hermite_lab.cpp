#include "compop/hermite_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "compop/error.hpp"
#include "compop/format.hpp"
#include "compop/numerics/linalg.hpp"
#include "compop/rkhs_core.hpp"

namespace compop::hermite {

namespace {

constexpr double kPi = std::numbers::pi;

void check_degree(int n, int cap) {
  if (n < 0) throw DomainError("hermite: degree must be nonnegative");
  if (n > cap) throw SizeError("hermite: degree " + std::to_string(n) + " exceeds cap");
}

// Hermite polynomials orthonormal for e^{-x^2}, values p_0..p_n at x.
std::vector<double> orthonormal_hermite(int n, double x) {
  std::vector<double> p(n + 1);
  p[0] = std::pow(kPi, -0.25);
  if (n >= 1) p[1] = std::sqrt(2.0) * x * p[0];
  for (int k = 1; k < n; ++k)
    p[k + 1] = (x * p[k] - std::sqrt(0.5 * k) * p[k - 1]) / std::sqrt(0.5 * (k + 1));
  return p;
}

// Legendre polynomials orthonormal on [-1, 1].
std::vector<double> orthonormal_legendre(int n, double x) {
  auto beta = [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); };
  std::vector<double> p(n + 1);
  p[0] = 1.0 / std::sqrt(2.0);
  if (n >= 1) p[1] = x * p[0] / beta(1);
  for (int k = 1; k < n; ++k) p[k + 1] = (x * p[k] - beta(k) * p[k - 1]) / beta(k + 1);
  return p;
}

double log_norm_sq(int n) {
  return 0.5 * std::log(kPi) + n * std::log(2.0) + std::lgamma(n + 1.0);
}

KernelSpec one_dimensional(const KernelSpec& spec) {
  switch (spec.family()) {
    case kernels::KernelFamily::Gaussian: return KernelSpec::gaussian(spec.parameter(), 1);
    case kernels::KernelFamily::Sinc: return KernelSpec::sinc(spec.parameter(), 1);
    case kernels::KernelFamily::Tabulated: return spec;
  }
  return spec;
}

// basis[i][k] = p_i(xi_k) for the weight's orthonormal basis on the given nodes.
std::vector<std::vector<double>> weight_basis(const KernelSpec& spec,
                                              const rkhs::SpectralQuadrature& sq, int n) {
  const std::size_t nodes = sq.nodes.size();
  std::vector<std::vector<double>> basis(n + 1, std::vector<double>(nodes));
  switch (spec.family()) {
    case kernels::KernelFamily::Gaussian: {
      // t = pi s xi turns the weight into e^{-t^2} / sqrt(pi)
      const double s = spec.parameter();
      const double scale = std::pow(kPi, 0.25);
      for (std::size_t k = 0; k < nodes; ++k) {
        const auto p = orthonormal_hermite(n, kPi * s * sq.nodes[k][0]);
        for (int i = 0; i <= n; ++i) basis[i][k] = scale * p[i];
      }
      break;
    }
    case kernels::KernelFamily::Sinc: {
      const double b = *spec.support_half_width();
      const double level = kPi / spec.parameter();
      const double scale = 1.0 / std::sqrt(level * b);
      for (std::size_t k = 0; k < nodes; ++k) {
        const auto p = orthonormal_legendre(n, sq.nodes[k][0] / b);
        for (int i = 0; i <= n; ++i) basis[i][k] = scale * p[i];
      }
      break;
    }
    case kernels::KernelFamily::Tabulated: {
      // discrete Stieltjes: Lanczos on multiplication by xi
      auto inner = [&](const std::vector<double>& f, const std::vector<double>& g) {
        double s = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) s += sq.weights[k] * f[k] * g[k];
        return s;
      };
      std::fill(basis[0].begin(), basis[0].end(), 1.0);
      for (int i = 0; i <= n; ++i) {
        if (i > 0)
          for (std::size_t k = 0; k < nodes; ++k) basis[i][k] = sq.nodes[k][0] * basis[i - 1][k];
        for (int rep = 0; rep < 2; ++rep)
          for (int j = 0; j < i; ++j) {
            const double c = inner(basis[i], basis[j]);
            for (std::size_t k = 0; k < nodes; ++k) basis[i][k] -= c * basis[j][k];
          }
        const double nrm = std::sqrt(inner(basis[i], basis[i]));
        if (!(nrm > 1e-300))
          throw OrthonormalizationFailure("growth rate: weight has too few support nodes");
        for (auto& v : basis[i]) v /= nrm;
      }
      break;
    }
  }
  return basis;
}

double lambda_max_leading(const Matrix<double>& m, std::size_t size) {
  Matrix<double> block(size, size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) block(i, j) = m(i, j);
  return numerics::sym_eig(std::move(block)).values.back();
}

std::vector<std::vector<int>> graded_multi_indices(int d, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(d, 0);
  for (int total = 0; total <= n; ++total) {
    // all alpha with |alpha| = total, lexicographically descending
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == d - 1) {
        cur[axis] = left;
        out.push_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v) {
        cur[axis] = v;
        rec(axis + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

std::size_t binomial_size(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::size_t>(std::llround(r));
}

}  // namespace

double hermite_eval(int n, double x, int cap) {
  check_degree(n, cap);
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  if (std::isfinite(cur)) return cur;
  return hermite_eval(n, BigRational::from_double(x), cap).to_double();
}

BigRational hermite_eval(int n, const BigRational& x, int cap) {
  check_degree(n, cap);
  BigRational prev(1);
  if (n == 0) return prev;
  BigRational cur = BigRational(2) * x;
  for (int k = 1; k < n; ++k) {
    BigRational next = BigRational(2) * x * cur - BigRational(2L * k) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<BigRational> hermite_monomial(int n) {
  check_degree(n, kDefaultCap);
  std::vector<BigRational> prev{BigRational(1)};
  if (n == 0) return prev;
  std::vector<BigRational> cur{BigRational(0), BigRational(2)};
  for (int k = 1; k < n; ++k) {
    std::vector<BigRational> next(k + 2);
    for (int j = 0; j <= k; ++j) next[j + 1] += BigRational(2) * cur[j];
    for (int j = 0; j < k; ++j) next[j] -= BigRational(2L * k) * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

BigRational HermiteExpansion::evaluate(const BigRational& x) const {
  BigRational s(0);
  for (int j = 0; j <= degree; ++j)
    if (coefficients[j].sign() != 0) s += coefficients[j] * hermite_eval(j, x);
  return s;
}

double HermiteExpansion::evaluate(double x) const {
  double s = 0.0;
  for (int j = 0; j <= degree; ++j) s += shadow[j] * hermite_eval(j, x);
  return s;
}

std::vector<BigRational> HermiteExpansion::monomial() const {
  std::vector<BigRational> out(degree + 1);
  for (int j = 0; j <= degree; ++j) {
    if (coefficients[j].sign() == 0) continue;
    const auto h = hermite_monomial(j);
    for (int k = 0; k <= j; ++k) out[k] += coefficients[j] * h[k];
  }
  return out;
}

HermiteExpansion shifted_expansion(int n, const BigRational& a, int cap) {
  check_degree(n, cap);
  HermiteExpansion e;
  e.degree = n;
  e.coefficients.assign(n + 1, BigRational(0));
  // 2n(2n-2)...(2n-2k+2) / k! = 2^k C(n, k)
  BigRational ak(1);
  for (int k = 0; k <= n; ++k) {
    e.coefficients[n - k] = numerics::pow(BigRational(2), k) * numerics::binomial(n, k) * ak;
    ak *= a;
  }
  for (const auto& c : e.coefficients) e.shadow.push_back(c.to_double());
  return e;
}

HermiteExpansion to_hermite_basis(const std::vector<BigRational>& monomial) {
  std::vector<BigRational> rest = monomial;
  while (rest.size() > 1 && rest.back().sign() == 0) rest.pop_back();
  HermiteExpansion e;
  e.degree = static_cast<int>(rest.size()) - 1;
  e.coefficients.assign(rest.size(), BigRational(0));
  for (int k = e.degree; k >= 0; --k) {
    if (rest[k].sign() == 0) continue;
    const BigRational c = rest[k] / numerics::pow(BigRational(2), k);
    e.coefficients[k] = c;
    const auto h = hermite_monomial(k);
    for (int j = 0; j <= k; ++j) rest[j] -= c * h[j];
  }
  for (const auto& c : e.coefficients) e.shadow.push_back(c.to_double());
  return e;
}

BigRational hermite_norm_sq_over_sqrt_pi(int n) {
  return numerics::pow(BigRational(2), n) * numerics::factorial(n);
}

double hermite_orthogonality(int m, int n, const QuadratureScheme& quad) {
  check_degree(m, kDefaultCap);
  check_degree(n, kDefaultCap);
  if (quad.kind != numerics::QuadratureKind::GaussHermite)
    throw ExactnessViolated("hermite_orthogonality: a Gauss-Hermite rule is required");
  const int need = (m + n) / 2 + 1;
  if (quad.node_count < need)
    throw ExactnessViolated("hermite_orthogonality: need " + std::to_string(need) +
                            " nodes, got " + std::to_string(quad.node_count));
  const int top = std::max(m, n);
  double s = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const auto p = orthonormal_hermite(top, quad.nodes[k]);
    s += quad.weights[k] * p[m] * p[n];
  }
  return s * std::exp(0.5 * (log_norm_sq(m) + log_norm_sq(n)));
}

BigRational shift_norm_ratio_exact(int n, const BigRational& a) {
  check_degree(n, kDefaultCap);
  // sum_k c_k^2 ||H_{n-k}||^2 / ||H_n||^2 with c_k = 2^k C(n,k) a^k
  // collapses to sum_k 2^k C(n,k) a^{2k} / k!
  const BigRational a2 = a * a;
  BigRational sum(0);
  for (int k = 0; k <= n; ++k) {
    sum += numerics::pow(BigRational(2), k) * numerics::binomial(n, k) * numerics::pow(a2, k) /
           numerics::factorial(k);
  }
  return sum;
}

double shift_norm_ratio(int n, double a, RatioMode mode) {
  check_degree(n, kDefaultCap);
  if (!std::isfinite(a)) throw DomainError("shift_norm_ratio: shift must be finite");
  if (mode == RatioMode::Exact) return shift_norm_ratio_exact(n, BigRational::from_double(a)).to_double();
  const auto quad = numerics::gauss_hermite_nodes(std::min(n + 2, 200));
  double s = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const double v = orthonormal_hermite(n, quad.nodes[k] + a)[n];
    s += quad.weights[k] * v * v;
  }
  return s;
}

double polynomial_shift_ratio(const std::vector<double>& c, double a) {
  if (c.empty()) throw DomainError("polynomial_shift_ratio: empty polynomial");
  const int n = static_cast<int>(c.size()) - 1;
  check_degree(n, kDefaultCap);
  std::vector<double> scaled(n + 1);
  double den = 0.0;
  for (int k = 0; k <= n; ++k) {
    scaled[k] = c[k] * std::exp(0.5 * log_norm_sq(k));
    den += scaled[k] * scaled[k];
  }
  if (!(den > 0.0)) throw DomainError("polynomial_shift_ratio: zero polynomial");
  const auto quad = numerics::gauss_hermite_nodes(std::min(n + 2, 200));
  double num = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const auto p = orthonormal_hermite(n, quad.nodes[k] + a);
    double v = 0.0;
    for (int j = 0; j <= n; ++j) v += scaled[j] * p[j];
    num += quad.weights[k] * v * v;
  }
  return num / den;
}

double c_a_constant(double a) {
  const double a2 = a * a;
  if (a2 == 0.0) return 1.0;
  // a^{2k}/k! increases while k + 1 <= a^2
  const double k = std::floor(a2);
  return std::exp(k * std::log(a2) - std::lgamma(k + 1.0));
}

double shift_ratio_bound(int n, double a) {
  return n * std::pow(8.0, n) * std::exp(a * a) * c_a_constant(a);
}

Matrix<double> multiplier_moment_matrix(const KernelSpec& spec, double im_z, int n,
                                        const QuadratureScheme& quad) {
  if (n < 0) throw DomainError("multiplier_moment_matrix: degree must be nonnegative");
  const KernelSpec spec1 = one_dimensional(spec);
  const auto sq = rkhs::spectral_quadrature(spec1, quad);
  const auto basis = weight_basis(spec1, sq, n);
  const std::size_t nodes = sq.nodes.size();

  double worst = 0.0;
  Matrix<double> m(n + 1, n + 1);
  std::vector<double> growth(nodes);
  for (std::size_t k = 0; k < nodes; ++k)
    growth[k] = sq.weights[k] * std::exp(4.0 * kPi * im_z * sq.nodes[k][0]);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= i; ++j) {
      double g = 0.0, v = 0.0;
      for (std::size_t k = 0; k < nodes; ++k) {
        const double pp = basis[i][k] * basis[j][k];
        g += sq.weights[k] * pp;
        v += growth[k] * pp;
      }
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      m(i, j) = v;
      m(j, i) = v;
    }
  if (worst > 1e-10)
    throw OrthonormalizationFailure("multiplier_moment_matrix: basis Gram deviates from I by " +
                                    format_double(worst));
  return m;
}

Matrix<double> gaussian_moment_closed_form(double scale, double im_z, int n) {
  if (!(scale > 0.0) || !std::isfinite(im_z))
    throw DomainError("gaussian_moment_closed_form: bad scale or Im z");
  // e^{4 pi b xi} with t = pi s xi is e^{2 c t}, c = 2b/s; completing the
  // square leaves e^{c^2} times the moments of the shifted weight
  const double c_d = 2.0 * im_z / scale;
  const BigRational c = BigRational::from_double(c_d);
  const double prefactor = std::exp(c_d * c_d);
  std::vector<BigRational> cpow(2 * n + 1);
  cpow[0] = BigRational(1);
  for (int k = 1; k <= 2 * n; ++k) cpow[k] = cpow[k - 1] * c;

  Matrix<double> m(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= i; ++j) {
      BigRational s(0);
      for (int k = 0; k <= j; ++k)
        s += numerics::pow(BigRational(2), i + j - k) * numerics::binomial(i, k) *
             numerics::binomial(j, k) * cpow[i + j - 2 * k] * numerics::factorial(k);
      const BigRational q = s * s / (hermite_norm_sq_over_sqrt_pi(i) * hermite_norm_sq_over_sqrt_pi(j));
      const double v = prefactor * s.sign() * std::sqrt(q.to_double());
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

QuadratureScheme default_rho_scheme(const KernelSpec& spec) {
  switch (spec.family()) {
    case kernels::KernelFamily::Gaussian:
      return numerics::gauss_hermite_nodes(200);
    case kernels::KernelFamily::Sinc: {
      const double b = *spec.support_half_width();
      return numerics::gauss_legendre_nodes(200, -b, b);
    }
    case kernels::KernelFamily::Tabulated:
      return rkhs::default_scheme(spec);
  }
  return numerics::gauss_hermite_nodes(200);
}

GrowthRateSeries growth_rate_series(const KernelSpec& spec, const StripPoint& z, int n_max,
                                    const QuadratureScheme& quad) {
  if (n_max < 1) throw DomainError("growth_rate_series: n must be positive");
  if (z.dimension() != spec.dimension())
    throw DomainError("growth_rate_series: z and kernel dimensions differ");
  const double strip = kernels::admissible_strip(spec);
  const auto im = z.imag();
  for (double b : im)
    if (std::abs(b) > 0.0 && !(std::abs(b) < strip))
      throw StripViolation("growth_rate_series: Im z outside the admissible strip");

  GrowthRateSeries out;
  out.z = z.z();
  out.family = kernels::to_string(spec.family());
  if (z.is_real()) {
    for (int n = 1; n <= n_max; ++n) out.entries.push_back({n, 1.0, 1.0});
    return out;
  }

  const int d = spec.dimension();
  Matrix<double> big;
  std::vector<std::size_t> block_size(n_max + 1);
  if (d == 1) {
    big = multiplier_moment_matrix(spec, im[0], n_max, quad);
    for (int n = 0; n <= n_max; ++n) block_size[n] = n + 1;
  } else {
    std::vector<Matrix<double>> axis;
    for (int k = 0; k < d; ++k)
      axis.push_back(im[k] == 0.0 ? Matrix<double>::identity(n_max + 1)
                                  : multiplier_moment_matrix(spec, im[k], n_max, quad));
    const auto idx = graded_multi_indices(d, n_max);
    if (idx.size() > 600) throw SizeError("growth_rate_series: multi-index basis too large");
    big = Matrix<double>(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) {
        double v = 1.0;
        for (int k = 0; k < d; ++k) v *= axis[k](idx[a][k], idx[b][k]);
        big(a, b) = v;
      }
    for (int n = 0; n <= n_max; ++n) block_size[n] = binomial_size(n + d, d);
  }
  for (int n = 1; n <= n_max; ++n) {
    const double lam = lambda_max_leading(big, block_size[n]);
    const double rho = std::sqrt(std::max(lam, 0.0));
    out.entries.push_back({n, rho, std::pow(rho, 1.0 / n)});
  }
  return out;
}

GrowthRateSeries growth_rate_series(const KernelSpec& spec, const StripPoint& z, int n_max) {
  return growth_rate_series(spec, z, n_max, default_rho_scheme(spec));
}

double growth_rate_rho(const KernelSpec& spec, const StripPoint& z, int n,
                       const QuadratureScheme& quad) {
  return growth_rate_series(spec, z, n, quad).entries.back().rho;
}

std::string GrowthRateSeries::to_csv() const {
  std::string im;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) im += ';';
    im += format_double(z[i].imag());
  }
  std::ostringstream os;
  os << "n,rho_n,rho_n_nth_root,family,im_z\n";
  for (const auto& e : entries)
    os << e.n << ',' << format_double(e.rho) << ',' << format_double(e.nth_root) << ','
       << family << ',' << im << '\n';
  return os.str();
}

}  // namespace compop::hermite
