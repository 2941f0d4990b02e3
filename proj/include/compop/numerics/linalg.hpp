#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <type_traits>
#include <vector>

#include "compop/error.hpp"
#include "compop/numerics/matrix.hpp"

namespace compop::numerics {

/// Lower-triangular L with L L^H = M + eps I, or nullopt when a pivot is
/// not strictly positive.
template <typename S>
std::optional<Matrix<S>> cholesky(const Matrix<S>& m,
                                  typename scalar_traits<S>::real_type eps = 0) {
  using R = typename scalar_traits<S>::real_type;
  using Tr = scalar_traits<S>;
  using std::sqrt;
  const std::size_t n = m.rows();
  Matrix<S> l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    R d = Tr::real(m(j, j)) + eps;
    for (std::size_t k = 0; k < j; ++k) d -= Tr::abs2(l(j, k));
    if (!(d > R(0))) return std::nullopt;
    const R ljj = sqrt(d);
    l(j, j) = S(ljj);
    for (std::size_t i = j + 1; i < n; ++i) {
      S s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * Tr::conj(l(j, k));
      l(i, j) = s / S(ljj);
    }
  }
  return l;
}

template <typename R>
struct SymEig {
  std::vector<R> values;  // ascending
  Matrix<R> vectors;      // column k pairs with values[k]
  int sweeps = 0;
};

template <typename R>
R jacobi_default_tolerance() {
  if constexpr (std::is_same_v<R, double>) {
    return 1e-14;
  } else {
    return R(64) * std::numeric_limits<R>::epsilon();
  }
}

/// Cyclic Jacobi eigensolver. Converged when the off-diagonal Frobenius mass
/// drops below tol * ||M||_F.
template <typename R>
SymEig<R> sym_eig(Matrix<R> a, R tol = jacobi_default_tolerance<R>(),
                  int max_sweeps = 100) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = a.rows();
  if (!a.square()) throw SizeError("sym_eig: matrix is not square");
  Matrix<R> v = Matrix<R>::identity(n);
  const R norm = frobenius_norm(a);
  int sweep = 0;
  if (norm > R(0)) {
    for (;; ++sweep) {
      R off(0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) off += a(i, j) * a(i, j);
      if (sqrt(off) <= tol * norm) break;
      if (sweep >= max_sweeps)
        throw NumericError("sym_eig: cyclic Jacobi did not converge");
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const R apq = a(p, q);
          if (apq == R(0)) continue;
          const R theta = (a(q, q) - a(p, p)) / (R(2) * apq);
          R t;
          if (abs(theta) > R(1e150)) {
            t = R(1) / (R(2) * theta);
          } else {
            t = R(1) / (abs(theta) + sqrt(theta * theta + R(1)));
            if (theta < R(0)) t = -t;
          }
          const R c = R(1) / sqrt(t * t + R(1));
          const R s = t * c;
          for (std::size_t k = 0; k < n; ++k) {
            const R akp = a(k, p);
            const R akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(k, q) = s * akp + c * akq;
          }
          for (std::size_t k = 0; k < n; ++k) {
            const R apk = a(p, k);
            const R aqk = a(q, k);
            a(p, k) = c * apk - s * aqk;
            a(q, k) = s * apk + c * aqk;
          }
          a(p, q) = R(0);
          a(q, p) = R(0);
          for (std::size_t k = 0; k < n; ++k) {
            const R vkp = v(k, p);
            const R vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEig<R> out;
  out.values.reserve(n);
  out.vectors = Matrix<R>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  out.sweeps = sweep;
  return out;
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
/// Each eigenvalue of the original appears twice.
template <typename R>
Matrix<R> real_embedding(const Matrix<std::complex<double>>& m) {
  const std::size_t n = m.rows();
  Matrix<R> e(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const R re(m(i, j).real());
      const R im(m(i, j).imag());
      e(i, j) = re;
      e(i + n, j + n) = re;
      e(i, j + n) = -im;
      e(i + n, j) = im;
    }
  return e;
}

inline bool is_real(const Matrix<std::complex<double>>& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](const std::complex<double>& v) { return v.imag() == 0.0; });
}

template <typename R>
Matrix<R> real_part(const Matrix<std::complex<double>>& m) {
  Matrix<R> r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = R(m(i, j).real());
  return r;
}

/// Eigenvalues (ascending) of a Hermitian matrix.
inline std::vector<double> hermitian_eigenvalues(const Matrix<std::complex<double>>& m) {
  if (is_real(m)) return sym_eig(real_part<double>(m)).values;
  const auto doubled = sym_eig(real_embedding<double>(m)).values;
  std::vector<double> out;
  out.reserve(m.rows());
  for (std::size_t k = 0; k + 1 < doubled.size(); k += 2)
    out.push_back(0.5 * (doubled[k] + doubled[k + 1]));
  return out;
}

/// Solves L X = B in place for lower-triangular L.
template <typename R>
void forward_substitute(const Matrix<R>& l, Matrix<R>& b) {
  const std::size_t n = l.rows();
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t i = 0; i < n; ++i) {
      R s = b(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
      b(i, c) = s / l(i, i);
    }
}

/// L^{-1} A L^{-T}, symmetrized, where L L^T = B + eps I.
template <typename R>
Matrix<R> reduce_pencil(const Matrix<R>& a, const Matrix<R>& b, R eps) {
  auto l = cholesky(b, eps);
  if (!l) throw CholeskyFailure("pencil: B + eps I is not positive definite");
  Matrix<R> y = a;
  forward_substitute(*l, y);
  Matrix<R> c = y.transpose();
  forward_substitute(*l, c);
  const std::size_t n = c.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const R s = (c(i, j) + c(j, i)) / R(2);
      c(i, j) = s;
      c(j, i) = s;
    }
  return c;
}

/// Largest eigenvalue of the symmetric pencil (A, B + eps I).
template <typename R>
R pencil_max_eigenvalue(const Matrix<R>& a, const Matrix<R>& b, R eps) {
  const auto eig = sym_eig(reduce_pencil(a, b, eps));
  return eig.values.empty() ? R(0) : eig.values.back();
}

/// Singular values (descending) via the eigenvalues of A^T A.
inline std::vector<double> svd_small(const Matrix<double>& a) {
  if (a.rows() > 64 || a.cols() > 64) throw SizeError("svd_small: dimension exceeds 64");
  const auto eig = sym_eig(a.transpose() * a);
  std::vector<double> s;
  s.reserve(eig.values.size());
  for (auto it = eig.values.rbegin(); it != eig.values.rend(); ++it)
    s.push_back(std::sqrt(std::max(*it, 0.0)));
  return s;
}

/// Numerical rank: singular values above rel_tol * sigma_max. Squaring in
/// A^T A limits resolution to about sqrt(machine eps), hence the default.
inline std::size_t matrix_rank(const Matrix<double>& a, double rel_tol = 1e-7) {
  const auto s = svd_small(a);
  if (s.empty() || s.front() == 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [&](double v) { return v > rel_tol * s.front(); }));
}

}  // namespace compop::numerics
