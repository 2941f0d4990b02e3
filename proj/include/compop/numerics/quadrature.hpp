#pragma once

#include <functional>
#include <vector>

namespace compop::numerics {

enum class QuadratureKind { GaussHermite, GaussLegendre, Trapezoid };

// One-dimensional rule sum_k w_k f(x_k).
//   GaussHermite:  approximates int f(x) e^{-x^2} dx over R.
//   GaussLegendre: approximates int_lo^hi f(x) dx.
//   Trapezoid:     composite trapezoid on [lo, hi] with `panels` coarse
//                  panels and `levels` Romberg levels folded into the weights.
struct QuadratureScheme {
  QuadratureKind kind = QuadratureKind::GaussHermite;
  int node_count = 0;
  double lo = 0.0;
  double hi = 0.0;
  int panels = 0;
  int levels = 1;
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)>& f) const;
};

/// Golub-Welsch rule for e^{-x^2}; n <= 200.
QuadratureScheme gauss_hermite_nodes(int n);

/// Golub-Welsch rule for Lebesgue measure on [lo, hi].
QuadratureScheme gauss_legendre_nodes(int n, double lo = -1.0, double hi = 1.0);

/// Trapezoid on [lo, hi] with Richardson (Romberg) extrapolation over
/// `levels` successive halvings; levels = 1 is the plain rule.
QuadratureScheme trapezoid_scheme(double lo, double hi, int panels, int levels);

}  // namespace compop::numerics
