#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compop/kernel_spectra.hpp"
#include "compop/numerics/matrix.hpp"
#include "compop/numerics/quadrature.hpp"

namespace compop::rkhs {

using kernels::KernelSpec;
using kernels::StripPoint;
using numerics::Matrix;
using numerics::QuadratureScheme;

struct DomainBox {
  std::vector<double> lo;
  std::vector<double> hi;

  bool contains(std::span<const double> x) const;
};

// Finite sample set {x_j} inside a domain U (a box, or all of R^d).
// Points must be pairwise separated by more than kMinSeparation.
class PointCloud {
 public:
  static constexpr double kMinSeparation = 1e-10;

  explicit PointCloud(std::vector<std::vector<double>> points,
                      std::optional<DomainBox> domain = std::nullopt, std::string id = {});

  std::size_t size() const { return points_.size(); }
  int dimension() const { return dimension_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  std::span<const double> point(std::size_t i) const { return points_[i]; }
  const std::optional<DomainBox>& domain() const { return domain_; }
  const std::string& id() const { return id_; }
  double min_separation() const;

  bool contains_all_of(const PointCloud& other) const;

 private:
  std::vector<std::vector<double>> points_;
  std::optional<DomainBox> domain_;
  std::string id_;
  int dimension_ = 0;
};

// Kernel matrix [u(x_i - x_j)] of a cloud.
struct GramMatrix {
  Matrix<std::complex<double>> entries;
  double jitter = 0.0;
  std::size_t size() const { return entries.rows(); }
};

GramMatrix gram(const KernelSpec& spec, const PointCloud& cloud);
/// Gram matrix of an arbitrary list of points (duplicates allowed).
GramMatrix gram_of_points(const KernelSpec& spec, const std::vector<std::vector<double>>& pts);

// Quadrature against the spectral weight: sum_k w_k f(xi_k) ~ int f(xi) weight(xi) dxi.
struct SpectralQuadrature {
  int dimension = 1;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

/// Tensor-product rule for the kernel's weight built from a 1-D base rule.
/// Gaussian weights take a Gauss-Hermite base (substitution t = pi s xi);
/// Sinc weights take a Trapezoid or Gauss-Legendre rule strictly inside the
/// support; tabulated weights take a Trapezoid rule inside the table range.
SpectralQuadrature spectral_quadrature(const KernelSpec& spec, const QuadratureScheme& base);

/// Default base rule for each family.
QuadratureScheme default_scheme(const KernelSpec& spec);

// A function h in H_k held by its image psi = h^ / weight in L^2(weight):
// a finite sum of terms c * xi^alpha * e_z(xi) with e_z(xi) = e^{-2 pi i z . xi}.
// The kernel section k_x is the single term e_x. An arbitrary transform
// evaluator h^ may be supplied instead, in which case psi = h^ / weight.
struct FourierTerm {
  std::complex<double> coefficient{1.0, 0.0};
  std::vector<std::complex<double>> point;
  std::vector<int> exponent;  // empty means all zeros
};

class FourierFunction {
 public:
  static FourierFunction kernel_section(std::span<const double> x);
  static FourierFunction kernel_combination(const std::vector<std::complex<double>>& coefficients,
                                            const std::vector<std::vector<double>>& points);
  static FourierFunction exponential(const StripPoint& z);
  static FourierFunction monomial_exponential(std::complex<double> coefficient,
                                              std::vector<int> exponent, const StripPoint& z);
  static FourierFunction from_transform(
      std::function<std::complex<double>(std::span<const double>)> transform,
      std::string description);

  FourierFunction& operator+=(const FourierFunction& other);
  FourierFunction scaled(std::complex<double> c) const;

  /// psi(xi) = h^(xi) / weight(xi).
  std::complex<double> psi(const KernelSpec& spec, std::span<const double> xi) const;
  /// h^(xi).
  std::complex<double> transform(const KernelSpec& spec, std::span<const double> xi) const;
  /// h(x) = sum_j c_j u(x - x_j); only for kernel combinations.
  std::complex<double> evaluate(const KernelSpec& spec, std::span<const double> x) const;

  const std::vector<FourierTerm>& terms() const { return terms_; }
  const std::string& description() const { return description_; }
  bool is_kernel_combination() const;

 private:
  std::vector<FourierTerm> terms_;
  std::function<std::complex<double>(std::span<const double>)> transform_;
  std::string description_;
};

/// <g, h>_{H_k} = int conj(g^) h^ / weight, by quadrature.
std::complex<double> rkhs_inner_fourier(const KernelSpec& spec, const FourierFunction& g,
                                        const FourierFunction& h, const QuadratureScheme& quad);
std::complex<double> rkhs_inner_fourier(const KernelSpec& spec, const FourierFunction& g,
                                        const FourierFunction& h, const SpectralQuadrature& quad);

/// ||phi(x) - phi(y)||_{H_k} = sqrt(2 u(0) - 2 Re u(x - y)).
double feature_distance(const KernelSpec& spec, std::span<const double> x,
                        std::span<const double> y);

/// || eps^{-1} (e_{z + eps e_j} - e_z) + 2 pi i xi_j e_z ||_{L^2(weight)}.
double derivative_identity_residual(const KernelSpec& spec, const StripPoint& z, int axis,
                                    double eps, const QuadratureScheme& quad);

}  // namespace compop::rkhs
