#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "compop/kernel_spectra.hpp"
#include "compop/numerics/matrix.hpp"
#include "compop/numerics/precision.hpp"
#include "compop/numerics/prng.hpp"
#include "compop/numerics/quadrature.hpp"
#include "compop/rkhs_core.hpp"

namespace compop::fs {

using kernels::KernelSpec;
using kernels::StripPoint;
using numerics::Matrix;
using numerics::Precision;
using rkhs::DomainBox;
using rkhs::GramMatrix;
using rkhs::PointCloud;

enum class MapKind { Affine, Quadratic, ScaledExp, Composite };

// A map f : U -> R^d. Composite applies its parts left to right.
class MapSpec {
 public:
  static MapSpec affine(Matrix<double> a, std::vector<double> b);
  static MapSpec affine_1d(double alpha, double beta);
  static MapSpec identity(int dimension);
  static MapSpec quadratic(int dimension);
  static MapSpec scaled_exp(double c, int dimension);
  static MapSpec composite(std::vector<MapSpec> parts);

  MapSpec with_domain(DomainBox box) const;

  MapKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const Matrix<double>& linear() const { return a_; }
  const std::vector<double>& offset() const { return b_; }
  double exp_scale() const { return c_; }
  const std::vector<MapSpec>& parts() const { return parts_; }
  const std::optional<DomainBox>& domain() const { return domain_; }

  std::vector<double> apply(std::span<const double> x) const;
  /// F(z) = A z + b for affine maps (their own entire extension).
  std::vector<std::complex<double>> apply_complex(std::span<const std::complex<double>> z) const;

  bool is_affine() const { return kind_ == MapKind::Affine; }
  std::string descriptor() const;

 private:
  MapKind kind_ = MapKind::Affine;
  int dimension_ = 1;
  Matrix<double> a_;
  std::vector<double> b_;
  double c_ = 1.0;
  std::vector<MapSpec> parts_;
  std::optional<DomainBox> domain_;
};

struct Pencil {
  GramMatrix g;
  GramMatrix g_f;
  bool degenerate_image = false;
  std::string warning;
};

/// G[i][j] = u(x_i - x_j) and G_f[i][j] = u(f(x_i) - f(x_j)).
Pencil kf_pencil(const KernelSpec& spec, const MapSpec& map, const PointCloud& cloud);

/// sqrt(lambda_max) of the pencil (G_f, G + eps I); throws CholeskyFailure
/// when G + eps I is not positive definite at the requested precision.
double norm_lower_bound(const GramMatrix& g, const GramMatrix& g_f, double eps,
                        Precision precision = Precision::Double);

/// Default jitter 1e-12 trace(G) / m.
double default_jitter(const GramMatrix& g);

struct JitterPolicy {
  std::optional<double> initial;  // absolute; default_jitter when absent
  double growth = 10.0;
  double ceiling_relative = 1e-6;  // give up past ceiling_relative * trace(G)
  Precision precision = Precision::Double;
};

struct NormEstimate {
  std::string cloud_id;
  std::size_t m = 0;
  double epsilon = 0.0;
  double value = 0.0;
  int escalations = 0;
  Precision precision = Precision::Double;
  bool degenerate_image = false;
  std::string error;  // nonempty when escalation was exhausted
};

/// norm_lower_bound with jitter escalation; records the epsilon used.
NormEstimate estimate_norm(const KernelSpec& spec, const MapSpec& map, const PointCloud& cloud,
                           const JitterPolicy& policy = {});

/// Largest root of the m = 2 pencil, max((u0 + h)/(u0 + eps + g), (u0 - h)/(u0 + eps - g)),
/// for real off-diagonal entries g of G and h of G_f.
double two_point_closed_form(double u0, double g, double h, double eps);

struct NormEstimateSeries {
  std::vector<NormEstimate> estimates;
  std::string map_descriptor;
  std::string kernel_descriptor;
  bool nested = false;
  bool monotone = true;  // nondecreasing within 1e-6, only meaningful when nested

  std::string to_csv() const;
};

/// Independent pencil solves, possibly on `jobs` threads; results keep the
/// order of `clouds`.
NormEstimateSeries divergence_scan(const KernelSpec& spec, const MapSpec& map,
                                   const std::vector<PointCloud>& clouds,
                                   const JitterPolicy& policy = {}, int jobs = 1);

/// ||K_f phi(x_m) - K_f phi(x_n)||^2 = 2u(0) - 2 Re u(A(x_m - x_n)) for pairs
/// separated by s along the first axis.
std::vector<double> compactness_probe(const KernelSpec& spec, const MapSpec& map,
                                      const std::vector<double>& separations);

struct SymmetricPowerMatrix {
  Matrix<double> base;
  int degree = 1;
  std::vector<std::vector<int>> basis;  // exponents, lexicographically descending
  Matrix<double> matrix;
};

inline constexpr std::size_t kSymmetricPowerCap = 500;

/// Action of xi_i -> sum_m A[m][i] xi_m on homogeneous degree-n polynomials.
SymmetricPowerMatrix symmetric_power(const Matrix<double>& a, int n);

/// Eigenvalues of a general real square matrix.
std::vector<std::complex<double>> general_eigenvalues(const Matrix<double>& a);

struct EigenGrowthRow {
  int n = 0;
  std::complex<double> alpha;
  double lhs = 0.0;  // |alpha|^n
  double rhs = 0.0;  // lambda^{-1/2} rho_n(-z) rho_n(F(z))
  double margin = 0.0;
  bool holds = true;
};

struct EigenGrowthReport {
  double lambda = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  std::vector<EigenGrowthRow> rows;
  bool all_hold = true;
};

EigenGrowthReport eigen_growth_check(const KernelSpec& spec, const MapSpec& map,
                                     const StripPoint& z, int n_max);

// Cloud designs.
PointCloud merging_pair(std::vector<double> x0, double delta, std::string id = {});
PointCloud random_cloud(int dimension, std::size_t m, const DomainBox& box,
                        numerics::CounterRng& rng, std::string id = {});
/// Prefixes of one random sequence, so each cloud contains the previous.
std::vector<PointCloud> nested_random(int dimension, const std::vector<std::size_t>& sizes,
                                      const DomainBox& box, std::uint64_t seed,
                                      const std::string& id_prefix = "nested");
PointCloud equispaced(double lo, double hi, std::size_t m, std::string id = {});

}  // namespace compop::fs
