#pragma once

#include <string>
#include <vector>

#include "compop/kernel_spectra.hpp"
#include "compop/numerics/matrix.hpp"
#include "compop/numerics/quadrature.hpp"
#include "compop/numerics/rational.hpp"

namespace compop::hermite {

using kernels::KernelSpec;
using kernels::StripPoint;
using numerics::BigRational;
using numerics::Matrix;
using numerics::QuadratureScheme;

inline constexpr int kDefaultCap = 200;

// Physicists' Hermite polynomials, H_{n+1} = 2x H_n - 2n H_{n-1}.
double hermite_eval(int n, double x, int cap = kDefaultCap);
BigRational hermite_eval(int n, const BigRational& x, int cap = kDefaultCap);

/// Monomial coefficients of H_n, index k multiplies x^k.
std::vector<BigRational> hermite_monomial(int n);

// sum_j coefficients[j] H_j(x), exact.
struct HermiteExpansion {
  int degree = 0;
  std::vector<BigRational> coefficients;  // index j multiplies H_j
  std::vector<double> shadow;             // float copy for reporting

  BigRational evaluate(const BigRational& x) const;
  double evaluate(double x) const;
  /// Monomial coefficients of the expansion.
  std::vector<BigRational> monomial() const;
};

/// H_n(x + a) = sum_k 2^k C(n, k) a^k H_{n-k}(x).
HermiteExpansion shifted_expansion(int n, const BigRational& a, int cap = kDefaultCap);

/// Expands a monomial-form polynomial in the Hermite basis.
HermiteExpansion to_hermite_basis(const std::vector<BigRational>& monomial);

/// ||H_n||^2 = sqrt(pi) 2^n n! with the sqrt(pi) factored out.
BigRational hermite_norm_sq_over_sqrt_pi(int n);

/// int H_m H_n e^{-x^2} dx on a Gauss-Hermite rule; needs at least
/// (m + n) / 2 + 1 nodes.
double hermite_orthogonality(int m, int n, const QuadratureScheme& quad);

enum class RatioMode { Exact, Quadrature };

/// R_n(a) = int H_n(x + a)^2 e^{-x^2} dx / (sqrt(pi) 2^n n!).
double shift_norm_ratio(int n, double a, RatioMode mode);
BigRational shift_norm_ratio_exact(int n, const BigRational& a);

/// int P(x + a)^2 e^{-x^2} / int P^2 e^{-x^2} for P = sum_k c_k H_k.
double polynomial_shift_ratio(const std::vector<double>& hermite_coefficients, double a);

/// C_a = sup_k a^{2k} / k!.
double c_a_constant(double a);
/// n 8^n e^{a^2} C_a.
double shift_ratio_bound(int n, double a);

// Degree-graded basis p_0..p_n orthonormal for the kernel weight; the
// multiplier |e^{-2 pi i z xi}|^2 = e^{4 pi Im z . xi} is compressed to it.
//
//   M(z)[i][j] = int p_i p_j e^{4 pi Im z . xi} weight(xi) dxi
//
// and rho_n = sqrt(lambda_max(M(z))) since M(0) = I.

/// One-dimensional M(z) for degrees 0..n by direct quadrature. Gaussian
/// needs a Gauss-Hermite rule; Sinc takes Gauss-Legendre or Trapezoid on the
/// support; tabulated weights use a discrete Stieltjes basis.
Matrix<double> multiplier_moment_matrix(const KernelSpec& spec, double im_z, int n,
                                        const QuadratureScheme& quad);

/// Exact Gaussian M(z) for degrees 0..n from the shifted Hermite expansion
/// after completing the square; im_z and the scale must be finite doubles.
Matrix<double> gaussian_moment_closed_form(double scale, double im_z, int n);

/// Default rule used by growth_rate_rho when none is given.
QuadratureScheme default_rho_scheme(const KernelSpec& spec);

struct GrowthRateEntry {
  int n = 0;
  double rho = 1.0;
  double nth_root = 1.0;
};

double growth_rate_rho(const KernelSpec& spec, const StripPoint& z, int n,
                       const QuadratureScheme& quad);

struct GrowthRateSeries {
  std::vector<std::complex<double>> z;
  std::string family;
  std::vector<GrowthRateEntry> entries;  // n = 1..N

  std::string to_csv() const;
};

/// rho_1..rho_N from the leading blocks of one M(z); separable across axes
/// in d > 1 using total-degree multi-indices.
GrowthRateSeries growth_rate_series(const KernelSpec& spec, const StripPoint& z, int n_max,
                                    const QuadratureScheme& quad);
GrowthRateSeries growth_rate_series(const KernelSpec& spec, const StripPoint& z, int n_max);

}  // namespace compop::hermite
