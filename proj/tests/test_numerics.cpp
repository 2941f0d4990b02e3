#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "compop/error.hpp"
#include "compop/numerics/linalg.hpp"
#include "compop/numerics/matrix.hpp"
#include "compop/numerics/precision.hpp"
#include "compop/numerics/prng.hpp"
#include "compop/numerics/quadrature.hpp"
#include "compop/numerics/rational.hpp"

using namespace compop::numerics;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

// (2k-1)!! sqrt(pi) / 2^k
double hermite_moment(int k) {
  double v = kSqrtPi;
  for (int j = 1; j <= k; ++j) v *= (2.0 * j - 1.0) / 2.0;
  return v;
}

Matrix<double> random_symmetric(std::size_t n, CounterRng& rng) {
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
  return m;
}

// Q from Gram-Schmidt on a random matrix.
Matrix<double> random_orthogonal(std::size_t n, CounterRng& rng) {
  Matrix<double> q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) q(i, j) = rng.normal();
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
    }
    double nrm = 0;
    for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

}  // namespace

TEST_CASE("gauss-hermite small rules") {
  const auto q1 = gauss_hermite_nodes(1);
  REQUIRE(q1.nodes.size() == 1);
  CHECK(q1.nodes[0] == doctest::Approx(0.0));
  CHECK(q1.weights[0] == doctest::Approx(kSqrtPi).epsilon(1e-14));

  const auto q2 = gauss_hermite_nodes(2);
  CHECK(q2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(q2.nodes[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(q2.weights[0] == doctest::Approx(kSqrtPi / 2).epsilon(1e-14));
  CHECK(q2.weights[1] == doctest::Approx(kSqrtPi / 2).epsilon(1e-14));

  const auto q5 = gauss_hermite_nodes(5);
  const double m8 = q5.integrate([](double x) { return std::pow(x, 8); });
  CHECK(std::abs(m8 - 105.0 * kSqrtPi / 16.0) <= 1e-12);
}

TEST_CASE("gauss-hermite parity, moments and weights") {
  for (int n : {1, 3, 8, 20, 50, 100, 200}) {
    const auto q = gauss_hermite_nodes(n);
    double sum = 0;
    for (double w : q.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(std::abs(sum - kSqrtPi) <= 1e-12);
    if (n <= 100) {  // x^{2n-1} overflows beyond this
      const double odd = q.integrate([n](double x) { return std::pow(x, 2 * n - 1); });
      CHECK(std::abs(odd) <= 1e-12 * hermite_moment(n));
    }
    if (n <= 20) {
      const double even = q.integrate([n](double x) { return std::pow(x, 2 * n - 2); });
      CHECK(std::abs(even - hermite_moment(n - 1)) <= 1e-12 * hermite_moment(n - 1));
    }
  }
  CHECK_THROWS_AS(gauss_hermite_nodes(0), compop::SizeError);
  CHECK_THROWS_AS(gauss_hermite_nodes(201), compop::SizeError);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto q = gauss_legendre_nodes(6, -0.5, 2.0);
  // int x^11 = (2^12 - 0.5^12)/12
  const double v = q.integrate([](double x) { return std::pow(x, 11); });
  const double exact = (std::pow(2.0, 12) - std::pow(0.5, 12)) / 12.0;
  CHECK(v == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("romberg trapezoid order on the sinc support") {
  const double b = 1.0 / (2 * std::numbers::pi);
  auto f = [](double x) { return std::exp(3 * x) + x * x * std::cos(5 * x); };
  // closed forms
  auto antiderivative = [](double x) {
    const double e = std::exp(3 * x) / 3.0;
    const double p = (x * x / 5.0 - 2.0 / 125.0) * std::sin(5 * x) + 2.0 * x / 25.0 * std::cos(5 * x);
    return e + p;
  };
  const double exact = antiderivative(b) - antiderivative(-b);
  const double e1 = std::abs(trapezoid_scheme(-b, b, 1, 2).integrate(f) - exact);
  const double e2 = std::abs(trapezoid_scheme(-b, b, 2, 2).integrate(f) - exact);
  const double e3 = std::abs(trapezoid_scheme(-b, b, 4, 2).integrate(f) - exact);
  CHECK(std::log2(e1 / e2) >= 3.8);
  CHECK(std::log2(e2 / e3) >= 3.8);
  // plain trapezoid stays second order
  const double p1 = std::abs(trapezoid_scheme(-b, b, 4, 1).integrate(f) - exact);
  const double p2 = std::abs(trapezoid_scheme(-b, b, 8, 1).integrate(f) - exact);
  CHECK(std::log2(p1 / p2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("cholesky examples") {
  const auto id = cholesky(Matrix<double>::identity(3));
  REQUIRE(id.has_value());
  CHECK(*id == Matrix<double>::identity(3));

  const auto l = cholesky(Matrix<double>::from_rows({{2, 1}, {1, 2}}));
  REQUIRE(l.has_value());
  CHECK((*l)(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK((*l)(0, 1) == 0.0);
  CHECK((*l)(1, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK((*l)(1, 1) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));

  CHECK_FALSE(cholesky(Matrix<double>::from_rows({{1, 2}, {2, 1}})).has_value());
}

TEST_CASE("cholesky reconstructs hermitian input with jitter") {
  using C = std::complex<double>;
  CounterRng rng(11);
  const std::size_t n = 6;
  Matrix<C> b(n, n);
  for (auto& v : b.data()) v = C(rng.normal(), rng.normal());
  const Matrix<C> m = b * b.adjoint();
  const double eps = 1e-3;
  const auto l = cholesky(m, eps);
  REQUIRE(l.has_value());
  Matrix<C> shifted = m;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += eps;
  CHECK(frobenius_norm(*l * l->adjoint() - shifted) <= 1e-12 * frobenius_norm(m));
}

TEST_CASE("sym_eig examples") {
  auto e = sym_eig(Matrix<double>::from_rows({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}}));
  CHECK(e.values == std::vector<double>{1, 2, 3});
  e = sym_eig(Matrix<double>::from_rows({{0, 1}, {1, 0}}));
  CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sym_eig residuals, reconstruction and similarity invariance") {
  CounterRng rng(3);
  const auto m = random_symmetric(8, rng);
  const auto e = sym_eig(m);
  const double fn = frobenius_norm(m);
  Matrix<double> lam(8, 8);
  for (std::size_t k = 0; k < 8; ++k) {
    lam(k, k) = e.values[k];
    double res = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      double mv = 0;
      for (std::size_t j = 0; j < 8; ++j) mv += m(i, j) * e.vectors(j, k);
      res += std::pow(mv - e.values[k] * e.vectors(i, k), 2);
    }
    CHECK(std::sqrt(res) <= 1e-12 * fn);
  }
  CHECK(frobenius_norm(e.vectors * lam * e.vectors.transpose() - m) <= 1e-10 * fn);

  const auto q = random_orthogonal(8, rng);
  const auto e2 = sym_eig(q * m * q.transpose());
  for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(e2.values[k] - e.values[k]) <= 1e-10);
}

TEST_CASE("sym_eig matches characteristic polynomial roots") {
  // 2x2: (a+c)/2 -+ sqrt(((a-c)/2)^2 + b^2)
  const double a = 1.3, b = -0.7, c = 0.2;
  const auto e2 = sym_eig(Matrix<double>::from_rows({{a, b}, {b, c}}));
  const double mid = (a + c) / 2, rad = std::hypot((a - c) / 2, b);
  CHECK(std::abs(e2.values[0] - (mid - rad)) <= 1e-12);
  CHECK(std::abs(e2.values[1] - (mid + rad)) <= 1e-12);

  // 3x3 trigonometric solution of the depressed cubic
  const auto m = Matrix<double>::from_rows({{2, 1, 0.5}, {1, -1, 0.25}, {0.5, 0.25, 0.5}});
  const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
  const double qm = trace(m) / 3;
  const double p2 = std::pow(m(0, 0) - qm, 2) + std::pow(m(1, 1) - qm, 2) +
                    std::pow(m(2, 2) - qm, 2) + 2 * p1;
  const double p = std::sqrt(p2 / 6);
  Matrix<double> bm = m;
  for (int i = 0; i < 3; ++i) bm(i, i) -= qm;
  bm = (1 / p) * bm;
  const double detb = bm(0, 0) * (bm(1, 1) * bm(2, 2) - bm(1, 2) * bm(2, 1)) -
                      bm(0, 1) * (bm(1, 0) * bm(2, 2) - bm(1, 2) * bm(2, 0)) +
                      bm(0, 2) * (bm(1, 0) * bm(2, 1) - bm(1, 1) * bm(2, 0));
  const double phi = std::acos(std::clamp(detb / 2, -1.0, 1.0)) / 3;
  const double l3 = qm + 2 * p * std::cos(phi);
  const double l1 = qm + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
  const double l2 = 3 * qm - l1 - l3;
  const auto e3 = sym_eig(m);
  CHECK(std::abs(e3.values[0] - l1) <= 1e-12);
  CHECK(std::abs(e3.values[1] - l2) <= 1e-12);
  CHECK(std::abs(e3.values[2] - l3) <= 1e-12);
}

TEST_CASE("sym_eig in software precision") {
  Matrix<quad_float> m(2, 2);
  m(0, 0) = 2;
  m(0, 1) = m(1, 0) = 1;
  m(1, 1) = 2;
  const auto e = sym_eig(m);
  CHECK(abs(e.values[0] - quad_float(1)) < quad_float(1e-30));
  CHECK(abs(e.values[1] - quad_float(3)) < quad_float(1e-30));
}

TEST_CASE("svd_small examples") {
  const auto s1 = svd_small(Matrix<double>::identity(3));
  for (double s : s1) CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  const auto s2 = svd_small(Matrix<double>::from_rows({{2, 0}, {0, 0.5}}));
  CHECK(s2[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s2[1] == doctest::Approx(0.5).epsilon(1e-15));
  const double t = 0.4;
  const auto r = Matrix<double>::from_rows(
      {{0.7 * std::cos(t), -0.7 * std::sin(t)}, {0.7 * std::sin(t), 0.7 * std::cos(t)}});
  for (double s : svd_small(r)) CHECK(s == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(matrix_rank(Matrix<double>::from_rows({{1, 2}, {2, 4}})) == 1);
}

TEST_CASE("pencil maximum eigenvalue") {
  // (A, B) = (diag(4,1), diag(1,1)) -> 4
  const auto a = Matrix<double>::from_rows({{4, 0}, {0, 1}});
  CHECK(pencil_max_eigenvalue(a, Matrix<double>::identity(2), 0.0) == doctest::Approx(4.0));
  // with B = 2I the pencil value halves
  CHECK(pencil_max_eigenvalue(a, 2.0 * Matrix<double>::identity(2), 0.0) ==
        doctest::Approx(2.0));
}

TEST_CASE("real embedding doubles the hermitian spectrum") {
  using C = std::complex<double>;
  const auto h = Matrix<C>::from_rows({{C(2, 0), C(0, 1)}, {C(0, -1), C(2, 0)}});
  const auto ev = sym_eig(real_embedding<double>(h)).values;
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(1.0));
  CHECK(ev[2] == doctest::Approx(3.0));
  CHECK(ev[3] == doctest::Approx(3.0));
  CHECK_FALSE(is_real(h));
}

TEST_CASE("solvers are deterministic") {
  CounterRng r1(9), r2(9);
  const auto m1 = random_symmetric(10, r1);
  const auto m2 = random_symmetric(10, r2);
  REQUIRE(m1 == m2);
  const auto e1 = sym_eig(m1), e2 = sym_eig(m2);
  CHECK(e1.values == e2.values);
  CHECK(e1.vectors == e2.vectors);
  CHECK(gauss_hermite_nodes(97).nodes == gauss_hermite_nodes(97).nodes);
}

TEST_CASE("counter rng is random access and reproducible") {
  CounterRng a(42, 3);
  const auto first = a.next_u64();
  const auto second = a.next_u64();
  CHECK(a.at(0) == first);
  CHECK(a.at(1) == second);
  CHECK(CounterRng(42, 3).at(17) == CounterRng(42, 3).at(17));
  CHECK(CounterRng(42, 3).at(0) != CounterRng(42, 4).at(0));
  CounterRng b(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = b.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const long k = b.uniform_int(2, 8);
    CHECK((k >= 2 && k <= 8));
  }
  CHECK(CounterRng::algorithm == "splitmix64-counter");
}

TEST_CASE("big rational stays in lowest terms") {
  const BigRational r(6, 8);
  CHECK(r.numerator_string() == "3");
  CHECK(r.denominator_string() == "4");
  CHECK(BigRational(1, 3) + BigRational(1, 6) == BigRational(1, 2));
  CHECK(BigRational::parse("0.25") == BigRational(1, 4));
  CHECK(BigRational::parse("-7/21") == BigRational(-1, 3));
  CHECK(BigRational::from_double(0.1).to_double() == 0.1);
  CHECK(factorial(20).to_string() == "2432902008176640000");
  CHECK(binomial(50, 25).to_string() == "126410606437752");
  CHECK(pow(BigRational(2, 3), 3) == BigRational(8, 27));
  CHECK((BigRational(1, 2) / BigRational(-3, 4)) == BigRational(-2, 3));
  CHECK(BigRational(1, 3) < BigRational(1, 2));
  CHECK_THROWS(BigRational(1) / BigRational(0));
}

TEST_CASE("precision names") {
  CHECK(parse_precision("quad") == Precision::Quad);
  CHECK(to_string(Precision::Extended) == "extended");
  CHECK(mantissa_bits(Precision::Double) == 53);
  CHECK_THROWS(parse_precision("half"));
}
