#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compop/numerics/matrix.hpp"

namespace compop::kernels {

using numerics::Matrix;

enum class KernelFamily { Gaussian, Sinc, Tabulated };
enum class DecayClass { GaussianDecay, CompactSupport, Unknown };

std::string to_string(KernelFamily f);
std::string to_string(DecayClass c);

// Samples of a one-dimensional spectral weight on a uniform grid
// xi_k = xi_min + k * xi_step, linearly interpolated in between.
struct TabulatedWeight {
  double xi_min = 0.0;
  double xi_step = 0.0;
  std::vector<double> values;
  /// Declared sup bound of the weight; defaults to the sample maximum.
  std::optional<double> declared_bound;
  /// u(0) = int weight; computed by the trapezoid rule when absent.
  std::optional<double> u0;
  DecayClass decay = DecayClass::Unknown;

  double xi_max() const { return xi_min + xi_step * static_cast<double>(values.size() - 1); }
};

// Spectral side of a kernel: xi -> weight(xi) >= 0.
struct SpectralWeight {
  std::function<double(std::span<const double>)> evaluator;
  /// Half-width b of the support box, or nullopt for all of R^d.
  std::optional<double> support_half_width;
  DecayClass decay = DecayClass::Unknown;
};

// A translation-invariant kernel k(x, y) = u(x - y) with its Fourier weight,
// under the transform convention h^(xi) = int h(x) e^{-2 pi i x . xi} dx.
//
//   Gaussian(s): u(x) = exp(-|x/s|^2), weight (sqrt(pi) s)^d exp(-pi^2 s^2 |xi|^2)
//   Sinc(beta):  u(x) = prod_i sin(beta x_i)/(beta x_i),
//                weight (pi/beta)^d on the box |xi_i| <= beta/(2 pi)
//   Tabulated:   d = 1, weight sampled on a grid.
class KernelSpec {
 public:
  static KernelSpec gaussian(double scale = 1.0, int dimension = 1);
  static KernelSpec sinc(double bandwidth = 1.0, int dimension = 1);
  static KernelSpec tabulated(TabulatedWeight table);

  KernelFamily family() const { return family_; }
  int dimension() const { return dimension_; }
  /// Scale for Gaussian, bandwidth for Sinc, 0 for Tabulated.
  double parameter() const { return parameter_; }
  const TabulatedWeight& table() const { return table_; }

  double u0() const { return u0_; }
  DecayClass decay_class() const;
  std::optional<double> support_half_width() const;
  /// Grid-independent sup of the weight.
  double weight_bound() const;
  SpectralWeight spectral_weight() const;

  /// Short stable label used in CSV provenance columns.
  std::string descriptor() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&);

 private:
  KernelSpec(KernelFamily f, int d, double p) : family_(f), dimension_(d), parameter_(p) {}
  KernelFamily family_;
  int dimension_;
  double parameter_;
  double u0_ = 1.0;
  TabulatedWeight table_;
};

// Tensor grid on [-extent, extent]^d with points_per_axis points per axis.
struct GridPolicy {
  double extent = 8.0;
  int points_per_axis = 801;

  double spacing() const;
  std::size_t size(int dimension) const;
  /// Visits every grid point in lexicographic order.
  void for_each(int dimension, const std::function<void(std::span<const double>)>& visit) const;
};

std::complex<double> u_eval(const KernelSpec& spec, std::span<const double> x);
double weight_eval(const KernelSpec& spec, std::span<const double> xi);

/// Smallest certified c_a with weight(xi) <= c_a e^{-a |xi|}. Closed form for
/// the built-in families; grid supremum for tabulated weights.
double condition_a_constant(const KernelSpec& spec, double a, const GridPolicy& grid);
/// Grid supremum of weight(xi) e^{a |xi|} regardless of family.
double condition_a_constant_grid(const KernelSpec& spec, double a, const GridPolicy& grid);

struct DecayCheck {
  bool holds = false;
  double l_eps = 0.0;      // grid sup of weight (1 + |xi|^{2n+d+eps}) e^{4 pi a |xi|}
  double edge_value = 0.0; // largest weighted value on the outer shell of the grid
};

/// Relative edge threshold: the weighted weight must have decayed to
/// below kDecayEdgeTolerance * sup(weight) on the outer grid shell.
inline constexpr double kDecayEdgeTolerance = 1e-8;

DecayCheck decay_check_dc(const KernelSpec& spec, int n, double a, double eps,
                          const GridPolicy& grid);

struct GMembershipReport {
  Matrix<double> matrix;
  bool member = false;
  double lambda_est = 0.0;
  std::string reason;
  bool analytic = false;         // fast path used
  std::size_t grid_points = 0;   // points with weight above threshold
  std::size_t skipped_points = 0;
};

/// Ratios below this floor count as zero when deciding membership.
inline constexpr double kLambdaFloor = 1e-10;
/// Grid points with weight <= kWeightThreshold * sup(weight) are ignored.
inline constexpr double kWeightThreshold = 1e-30;

GMembershipReport g_membership(const KernelSpec& spec, const Matrix<double>& a,
                               const GridPolicy& grid);
/// Same estimate computed on the grid even for built-in families.
GMembershipReport g_membership_grid(const KernelSpec& spec, const Matrix<double>& a,
                                    const GridPolicy& grid);

struct SpanReport {
  bool spans = false;
  std::size_t rank = 0;
};

SpanReport g_spans_check(const std::vector<Matrix<double>>& members);

// Point of the strip {z in C^d : |Im z| < a}; a = 0 means Im z = 0 and
// a = infinity means all of C^d.
class StripPoint {
 public:
  explicit StripPoint(std::vector<std::complex<double>> z,
                      double bound = std::numeric_limits<double>::infinity());
  static StripPoint real(std::vector<double> x);
  static StripPoint imaginary(std::vector<double> y);

  const std::vector<std::complex<double>>& z() const { return z_; }
  double bound() const { return bound_; }
  int dimension() const { return static_cast<int>(z_.size()); }
  std::vector<double> imag() const;
  bool is_real() const;

 private:
  std::vector<std::complex<double>> z_;
  double bound_;
};

/// Largest strip half-width on which the weight is known to satisfy the
/// decay class used by analytic continuation (infinity for the built-ins).
double admissible_strip(const KernelSpec& spec);

}  // namespace compop::kernels
