#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/SVD>

#include "compop/error.hpp"
#include "compop/kernel_spectra.hpp"
#include "compop/numerics/prng.hpp"
#include "compop/numerics/quadrature.hpp"
#include "compop/serialization.hpp"

using namespace compop;
using namespace compop::kernels;
using numerics::CounterRng;

namespace {

constexpr double kPi = std::numbers::pi;

double u1(const KernelSpec& s, double x) {
  const double v[1] = {x};
  return u_eval(s, v).real();
}

double w1(const KernelSpec& s, double xi) {
  const double v[1] = {xi};
  return weight_eval(s, v);
}

// Taylor series of sin, independent of std::sin.
double sin_series(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 40; ++k) {
    term *= -x * x / ((2.0 * k) * (2.0 * k + 1));
    sum += term;
  }
  return sum;
}

// (1 + xi^2)^{-1} sampled on [-half, half]
TabulatedWeight lorentz_table(double half, double step) {
  TabulatedWeight t;
  t.xi_min = -half;
  t.xi_step = step;
  const auto n = static_cast<std::size_t>(std::llround(2 * half / step)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = -half + step * static_cast<double>(k);
    t.values.push_back(1.0 / (1.0 + xi * xi));
  }
  return t;
}

bool svd_member(const Matrix<double>& a) {
  const auto d = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = a(i, j);
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  return s(0) <= 1.0 + 1e-12 && s(d - 1) > 1e-12 * s(0);
}

}  // namespace

TEST_CASE("u_eval examples") {
  const auto g = KernelSpec::gaussian(1.0, 1);
  CHECK(u1(g, 0.0) == 1.0);
  CHECK(u1(g, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  const auto s = KernelSpec::sinc(1.0, 1);
  CHECK(std::abs(u1(s, kPi) - sin_series(kPi) / kPi) <= 1e-15);
  CHECK(std::abs(u1(s, kPi)) <= 1e-15);
  CHECK(u1(s, 0.0) == 1.0);
  CHECK(u1(s, 0.7) == doctest::Approx(sin_series(0.7) / 0.7).epsilon(1e-14));
  // Hermitian symmetry for real even kernels
  for (double x : {0.3, 1.7, 4.0}) {
    CHECK(u1(g, -x) == u1(g, x));
    CHECK(u1(s, -x) == u1(s, x));
  }
  const auto g2 = KernelSpec::gaussian(2.0, 2);
  const double x2[2] = {1.0, 1.0};
  CHECK(u_eval(g2, x2).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("weight_eval matches numeric Fourier integrals") {
  const auto g = KernelSpec::gaussian(1.0, 1);
  // int e^{-x^2} dx by Gauss-Legendre on [-12, 12]
  const auto gl = numerics::gauss_legendre_nodes(200, -12.0, 12.0);
  const double ft0 = gl.integrate([](double x) { return std::exp(-x * x); });
  CHECK(w1(g, 0.0) == doctest::Approx(ft0).epsilon(1e-13));
  CHECK(w1(g, 0.0) == doctest::Approx(1.772454).epsilon(1e-6));

  // inverse direction for Sinc: int_{-b}^{b} pi e^{2 pi i x xi} d xi = sin(x)/x
  const auto s = KernelSpec::sinc(1.0, 1);
  CHECK(w1(s, 0.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(w1(s, 1.0) == 0.0);
  const double b = 1.0 / (2 * kPi);
  for (double x : {0.5, 2.0, 4.5}) {
    const auto q = numerics::gauss_legendre_nodes(40, -b, b);
    const double inv = q.integrate([&](double xi) { return w1(s, xi) * std::cos(2 * kPi * x * xi); });
    CHECK(inv == doctest::Approx(sin_series(x) / x).epsilon(1e-13));
  }
  CHECK_THROWS_AS(w1(KernelSpec::tabulated(lorentz_table(2.0, 0.01)), 3.0), DomainError);
}

TEST_CASE("Fourier consistency on |x| <= 5") {
  // tolerance relative to u(0): far-tail values of sin(x)/x and e^{-x^2}
  // are below the rounding floor of any oscillatory quadrature
  const auto g = KernelSpec::gaussian(1.0, 1);
  const auto gl = numerics::gauss_legendre_nodes(200, -3.0, 3.0);  // weight < 1e-38 beyond
  const auto s = KernelSpec::sinc(1.0, 1);
  const double b = 1.0 / (2 * kPi);
  const auto gs = numerics::gauss_legendre_nodes(60, -b, b);
  for (double x = -5.0; x <= 5.0; x += 0.25) {
    const double ug = gl.integrate([&](double xi) { return w1(g, xi) * std::cos(2 * kPi * x * xi); });
    CHECK(std::abs(ug - u1(g, x)) <= 1e-8 * g.u0());
    const double us = gs.integrate([&](double xi) { return w1(s, xi) * std::cos(2 * kPi * x * xi); });
    CHECK(std::abs(us - u1(s, x)) <= 1e-8 * s.u0());
  }
}

TEST_CASE("Bochner grid positivity") {
  const GridPolicy grid{1.0, 2001};
  for (const auto& spec : {KernelSpec::gaussian(1.0, 1), KernelSpec::gaussian(0.3, 1),
                           KernelSpec::sinc(1.0, 1), KernelSpec::sinc(2.5, 1)}) {
    double lo = 1.0;
    grid.for_each(1, [&](std::span<const double> xi) { lo = std::min(lo, weight_eval(spec, xi)); });
    CHECK(lo >= -1e-12);
  }
  auto bad = lorentz_table(1.0, 0.5);
  bad.values[1] = -0.1;
  CHECK_THROWS_AS(KernelSpec::tabulated(bad), PositivityViolation);
}

TEST_CASE("condition (A) constants") {
  const GridPolicy fine{1.0, 20001};
  const auto g = KernelSpec::gaussian(1.0, 1);
  const double cg = condition_a_constant(g, 1.0, fine);
  CHECK(cg == doctest::Approx(std::sqrt(kPi) * std::exp(1 / (4 * kPi * kPi))).epsilon(1e-14));
  CHECK(cg == doctest::Approx(1.818).epsilon(1e-3));
  CHECK(condition_a_constant_grid(g, 1.0, fine) == doctest::Approx(cg).epsilon(1e-7));
  CHECK(condition_a_constant_grid(g, 1.0, fine) <= cg);

  const auto s = KernelSpec::sinc(1.0, 1);
  const double cs = condition_a_constant(s, 1.0, fine);
  CHECK(cs == doctest::Approx(kPi * std::exp(1 / (2 * kPi))).epsilon(1e-14));
  CHECK(cs == doctest::Approx(3.684).epsilon(1e-3));
  CHECK(condition_a_constant_grid(s, 1.0, fine) == doctest::Approx(cs).epsilon(1e-3));
  CHECK(condition_a_constant_grid(s, 1.0, fine) <= cs);

  CHECK(condition_a_constant(g, 1e-9, fine) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
  CHECK_THROWS_AS(condition_a_constant(g, 0.0, fine), DomainError);
}

TEST_CASE("decay condition (DC)") {
  const GridPolicy grid;
  const auto g = KernelSpec::gaussian(1.0, 1);
  for (int n : {1, 3, 6})
    for (double a : {0.0, 0.5, 2.0}) CHECK(decay_check_dc(g, n, a, 0.5, grid).holds);

  const auto s = KernelSpec::sinc(1.0, 1);
  const double b = 1.0 / (2 * kPi);
  for (int n : {1, 4})
    for (double a : {0.0, 1.0, 3.0}) {
      const auto r = decay_check_dc(s, n, a, 0.25, grid);
      CHECK(r.holds);
      CHECK(r.l_eps <= kPi * (1 + std::pow(b, 2 * n + 1 + 0.25)) * std::exp(2 * a) * (1 + 1e-12));
    }

  const auto lor = KernelSpec::tabulated(lorentz_table(30.0, 0.01));
  CHECK_FALSE(decay_check_dc(lor, 1, 1.0, 0.5, GridPolicy{20.0, 4001}).holds);

  // monotone in (n, a)
  const GridPolicy small{3.0, 601};
  const auto lor_small = KernelSpec::tabulated(lorentz_table(4.0, 0.01));
  for (int n = 1; n <= 3; ++n)
    for (double a : {0.0, 0.05, 0.2, 1.0}) {
      if (!decay_check_dc(lor_small, n, a, 0.5, small).holds) continue;
      for (int n2 = 1; n2 <= n; ++n2)
        for (double a2 : {0.0, 0.05, 0.2, 1.0})
          if (a2 <= a) CHECK(decay_check_dc(lor_small, n2, a2, 0.5, small).holds);
    }
}

TEST_CASE("G(u) membership examples") {
  const GridPolicy grid;
  const auto g = KernelSpec::gaussian(1.0, 1);
  auto r = g_membership(g, Matrix<double>::identity(1), grid);
  CHECK(r.member);
  CHECK(r.lambda_est == 1.0);
  r = g_membership(g, Matrix<double>::from_rows({{2.0}}), grid);
  CHECK_FALSE(r.member);
  CHECK(g_membership_grid(g, Matrix<double>::from_rows({{2.0}}), grid).lambda_est == 0.0);

  const auto s = KernelSpec::sinc(1.0, 1);
  r = g_membership(s, Matrix<double>::from_rows({{0.5}}), grid);
  CHECK(r.member);
  CHECK(r.lambda_est == 1.0);
  const auto rg = g_membership_grid(s, Matrix<double>::from_rows({{0.5}}), grid);
  CHECK(rg.member);
  CHECK(rg.lambda_est == doctest::Approx(1.0));

  r = g_membership(KernelSpec::gaussian(1.0, 2), Matrix<double>::from_rows({{1, 2}, {0.5, 1}}),
                   grid);
  CHECK_FALSE(r.member);
  CHECK(r.reason == "A ∉ GL_d");
}

TEST_CASE("Gaussian membership agrees with the singular-value oracle") {
  CounterRng rng(2024);
  const GridPolicy grid;
  int members = 0;
  for (int d : {2, 3}) {
    const auto spec = KernelSpec::gaussian(1.0, d);
    for (int k = 0; k < 50; ++k) {
      Matrix<double> a(d, d);
      for (auto& v : a.data()) v = rng.uniform(-0.9, 0.9);
      const bool oracle = svd_member(a);
      members += oracle;
      CHECK(g_membership(spec, a, grid).member == oracle);
    }
  }
  CHECK(members > 0);
  CHECK(members < 100);
}

TEST_CASE("products of members stay members") {
  // (1+xi^2)^{-1}: lambda for A = alpha > 1 is 1/alpha^2, attained at infinity
  const auto lor = KernelSpec::tabulated(lorentz_table(40.0, 0.01));
  const GridPolicy grid{8.0, 1601};
  const auto ra = g_membership(lor, Matrix<double>::from_rows({{2.0}}), grid);
  const auto rb = g_membership(lor, Matrix<double>::from_rows({{1.5}}), grid);
  const auto rab = g_membership(lor, Matrix<double>::from_rows({{3.0}}), grid);
  REQUIRE(ra.member);
  REQUIRE(rb.member);
  REQUIRE(rab.member);
  CHECK(ra.lambda_est >= 0.25);
  CHECK(rb.lambda_est >= 4.0 / 9.0);
  CHECK(rab.lambda_est >= 0.25 * 4.0 / 9.0);

  // built-in families on the grid path
  const auto g = KernelSpec::gaussian(1.0, 1);
  const auto pa = g_membership_grid(g, Matrix<double>::from_rows({{0.8}}), grid);
  const auto pb = g_membership_grid(g, Matrix<double>::from_rows({{-0.6}}), grid);
  const auto pab = g_membership_grid(g, Matrix<double>::from_rows({{-0.48}}), grid);
  CHECK(pab.lambda_est >= pa.lambda_est * pb.lambda_est * (1 - 1e-12));
}

TEST_CASE("span of members") {
  auto r = g_spans_check({Matrix<double>::identity(1), Matrix<double>::from_rows({{-1.0}})});
  CHECK(r.spans);
  CHECK(r.rank == 1);

  const double c = std::cos(kPi / 4) / 2, sn = std::sin(kPi / 4) / 2;
  const std::vector<Matrix<double>> four = {
      Matrix<double>::identity(2), Matrix<double>::from_rows({{1, 0}, {0, 0.5}}),
      Matrix<double>::from_rows({{0.5, 0}, {0, 1}}), Matrix<double>::from_rows({{c, -sn}, {sn, c}})};
  r = g_spans_check(four);
  // three diagonal matrices span only the diagonal plane
  CHECK(r.rank == 3);
  CHECK_FALSE(r.spans);
  auto five = four;
  five.push_back(Matrix<double>::from_rows({{0, 0.5}, {0.5, 0}}));
  r = g_spans_check(five);
  CHECK(r.rank == 4);
  CHECK(r.spans);

  r = g_spans_check({Matrix<double>::identity(2), Matrix<double>::identity(2)});
  CHECK(r.rank == 1);
  CHECK_FALSE(r.spans);
  r = g_spans_check({});
  CHECK(r.rank == 0);
  CHECK_FALSE(r.spans);
}

TEST_CASE("strip points") {
  const auto real = StripPoint::real({0.5, -1.0});
  CHECK(real.is_real());
  CHECK(real.dimension() == 2);
  const auto im = StripPoint::imaginary({1.0});
  CHECK_FALSE(im.is_real());
  CHECK(im.imag()[0] == 1.0);
  CHECK_THROWS(StripPoint(std::vector<std::complex<double>>{{0.0, 2.0}}, 1.0));
  CHECK(std::isinf(admissible_strip(KernelSpec::gaussian())));
}

TEST_CASE("kernel descriptors round-trip through JSON") {
  for (const auto& spec : {KernelSpec::gaussian(1.5, 2), KernelSpec::sinc(0.75, 1),
                           KernelSpec::tabulated(lorentz_table(3.0, 0.5))}) {
    const auto back = io::kernel_from_json(io::to_json(spec));
    CHECK(back == spec);
    CHECK(back.descriptor() == spec.descriptor());
  }
  CHECK_THROWS(KernelSpec::gaussian(-1.0, 1));
  CHECK_THROWS(KernelSpec::gaussian(1.0, 0));
  const GridPolicy grid{5.0, 101};
  const auto gb = io::grid_from_json(io::to_json(grid));
  CHECK(gb.extent == 5.0);
  CHECK(gb.points_per_axis == 101);
}
