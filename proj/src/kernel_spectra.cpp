#include "compop/kernel_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "compop/error.hpp"
#include "compop/format.hpp"
#include "compop/numerics/linalg.hpp"

namespace compop::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double sinc_factor(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite coordinate");
}

double determinant(Matrix<double> a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (a(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(c, k), a(piv, k));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (std::size_t k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

bool invertible(const Matrix<double>& a) {
  const double scale = numerics::frobenius_norm(a);
  if (scale == 0.0) return false;
  const double d = std::abs(determinant(a));
  return d > 1e-12 * std::pow(scale / std::sqrt(static_cast<double>(a.rows())),
                              static_cast<double>(a.rows()));
}

std::vector<double> transpose_apply(const Matrix<double>& a, std::span<const double> xi) {
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t m = 0; m < a.rows(); ++m) out[i] += a(m, i) * xi[m];
  return out;
}

// Range of the grid actually covered by the weight: the tabulated range
// clipped to the grid, or the grid cube for the built-in families.
struct Coverage {
  double lo;
  double hi;
};

Coverage coverage(const KernelSpec& spec, const GridPolicy& grid) {
  if (spec.family() == KernelFamily::Tabulated)
    return {std::max(-grid.extent, spec.table().xi_min),
            std::min(grid.extent, spec.table().xi_max())};
  return {-grid.extent, grid.extent};
}

bool in_coverage(const Coverage& c, std::span<const double> xi) {
  return std::all_of(xi.begin(), xi.end(), [&](double v) { return v >= c.lo && v <= c.hi; });
}

bool on_outer_shell(const Coverage& c, std::span<const double> xi) {
  const double band = 0.05 * (c.hi - c.lo) / 2.0;
  return std::any_of(xi.begin(), xi.end(),
                     [&](double v) { return v <= c.lo + band || v >= c.hi - band; });
}

}  // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Sinc: return "sinc";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::GaussianDecay: return "gaussian_decay";
    case DecayClass::CompactSupport: return "compact_support";
    case DecayClass::Unknown: return "unknown";
  }
  return "unknown";
}

KernelSpec KernelSpec::gaussian(double scale, int dimension) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw ValidationError("gaussian kernel: scale must be positive and finite");
  if (dimension < 1) throw ValidationError("kernel dimension must be >= 1");
  return KernelSpec(KernelFamily::Gaussian, dimension, scale);
}

KernelSpec KernelSpec::sinc(double bandwidth, int dimension) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ValidationError("sinc kernel: bandwidth must be positive and finite");
  if (dimension < 1) throw ValidationError("kernel dimension must be >= 1");
  return KernelSpec(KernelFamily::Sinc, dimension, bandwidth);
}

KernelSpec KernelSpec::tabulated(TabulatedWeight table) {
  if (table.values.size() < 2) throw ValidationError("tabulated weight: need >= 2 samples");
  if (!(table.xi_step > 0.0)) throw ValidationError("tabulated weight: xi_step must be > 0");
  double vmax = 0.0;
  for (double v : table.values) {
    if (!std::isfinite(v)) throw ValidationError("tabulated weight: non-finite sample");
    if (v < -1e-12) throw PositivityViolation("tabulated weight: negative sample (Bochner)");
    vmax = std::max(vmax, v);
  }
  if (!table.declared_bound) table.declared_bound = vmax;
  if (*table.declared_bound < vmax)
    throw ValidationError("tabulated weight: samples exceed the declared bound");
  if (!table.u0) {
    double s = 0.0;
    for (std::size_t k = 0; k < table.values.size(); ++k) {
      const double w = (k == 0 || k + 1 == table.values.size()) ? 0.5 : 1.0;
      s += w * table.values[k];
    }
    table.u0 = s * table.xi_step;
  }
  if (!(*table.u0 > 0.0) || !std::isfinite(*table.u0))
    throw ValidationError("tabulated weight: u(0) = int weight must be positive and finite");
  KernelSpec spec(KernelFamily::Tabulated, 1, 0.0);
  spec.u0_ = *table.u0;
  spec.table_ = std::move(table);
  return spec;
}

DecayClass KernelSpec::decay_class() const {
  switch (family_) {
    case KernelFamily::Gaussian: return DecayClass::GaussianDecay;
    case KernelFamily::Sinc: return DecayClass::CompactSupport;
    case KernelFamily::Tabulated: return table_.decay;
  }
  return DecayClass::Unknown;
}

std::optional<double> KernelSpec::support_half_width() const {
  if (family_ == KernelFamily::Sinc) return parameter_ / (2.0 * kPi);
  return std::nullopt;
}

double KernelSpec::weight_bound() const {
  switch (family_) {
    case KernelFamily::Gaussian: return std::pow(std::sqrt(kPi) * parameter_, dimension_);
    case KernelFamily::Sinc: return std::pow(kPi / parameter_, dimension_);
    case KernelFamily::Tabulated: return *table_.declared_bound;
  }
  return 0.0;
}

SpectralWeight KernelSpec::spectral_weight() const {
  SpectralWeight w;
  const KernelSpec copy = *this;
  w.evaluator = [copy](std::span<const double> xi) { return weight_eval(copy, xi); };
  w.support_half_width = support_half_width();
  w.decay = decay_class();
  return w;
}

std::string KernelSpec::descriptor() const {
  std::ostringstream os;
  switch (family_) {
    case KernelFamily::Gaussian:
      os << "gaussian(s=" << format_double(parameter_) << ";d=" << dimension_ << ")";
      break;
    case KernelFamily::Sinc:
      os << "sinc(beta=" << format_double(parameter_) << ";d=" << dimension_ << ")";
      break;
    case KernelFamily::Tabulated:
      os << "tabulated(n=" << table_.values.size() << ";d=1)";
      break;
  }
  return os.str();
}

bool operator==(const KernelSpec& a, const KernelSpec& b) {
  return a.family_ == b.family_ && a.dimension_ == b.dimension_ &&
         a.parameter_ == b.parameter_ && a.u0_ == b.u0_ &&
         a.table_.values == b.table_.values && a.table_.xi_min == b.table_.xi_min &&
         a.table_.xi_step == b.table_.xi_step;
}

double GridPolicy::spacing() const {
  return points_per_axis > 1 ? 2.0 * extent / (points_per_axis - 1) : 0.0;
}

std::size_t GridPolicy::size(int dimension) const {
  std::size_t n = 1;
  for (int i = 0; i < dimension; ++i) n *= static_cast<std::size_t>(points_per_axis);
  return n;
}

void GridPolicy::for_each(int dimension,
                          const std::function<void(std::span<const double>)>& visit) const {
  if (points_per_axis < 1 || !(extent >= 0.0))
    throw ValidationError("grid policy: points_per_axis >= 1 and extent >= 0 required");
  const double h = spacing();
  std::vector<int> idx(dimension, 0);
  std::vector<double> xi(dimension, 0.0);
  const std::size_t total = size(dimension);
  for (std::size_t count = 0; count < total; ++count) {
    for (int i = 0; i < dimension; ++i)
      xi[i] = points_per_axis == 1 ? 0.0 : -extent + h * idx[i];
    visit(xi);
    for (int i = dimension - 1; i >= 0; --i) {
      if (++idx[i] < points_per_axis) break;
      idx[i] = 0;
    }
  }
}

std::complex<double> u_eval(const KernelSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dimension())
    throw DomainError("u_eval: dimension mismatch");
  require_finite(x, "u_eval");
  switch (spec.family()) {
    case KernelFamily::Gaussian: {
      const double r = norm2(x) / spec.parameter();
      return std::exp(-r * r);
    }
    case KernelFamily::Sinc: {
      double p = 1.0;
      for (double xi : x) p *= sinc_factor(spec.parameter() * xi);
      return p;
    }
    case KernelFamily::Tabulated: {
      const auto& t = spec.table();
      // The sample spacing resolves |x| <= 1 / (2 xi_step).
      if (std::abs(x[0]) > 0.5 / t.xi_step)
        throw DomainError("u_eval: |x| beyond the resolution of the tabulated weight");
      std::complex<double> s = 0.0;
      for (std::size_t k = 0; k < t.values.size(); ++k) {
        const double w = (k == 0 || k + 1 == t.values.size()) ? 0.5 : 1.0;
        const double xi = t.xi_min + t.xi_step * static_cast<double>(k);
        s += w * t.values[k] * std::polar(1.0, 2.0 * kPi * x[0] * xi);
      }
      return s * t.xi_step;
    }
  }
  return 0.0;
}

double weight_eval(const KernelSpec& spec, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != spec.dimension())
    throw DomainError("weight_eval: dimension mismatch");
  require_finite(xi, "weight_eval");
  switch (spec.family()) {
    case KernelFamily::Gaussian: {
      const double s = spec.parameter();
      const double r = norm2(xi);
      return spec.weight_bound() * std::exp(-kPi * kPi * s * s * r * r);
    }
    case KernelFamily::Sinc: {
      const double b = *spec.support_half_width();
      for (double v : xi)
        if (std::abs(v) > b) return 0.0;
      return spec.weight_bound();
    }
    case KernelFamily::Tabulated: {
      const auto& t = spec.table();
      const double v = xi[0];
      if (v < t.xi_min || v > t.xi_max())
        throw DomainError("weight_eval: xi outside the tabulated range");
      const double pos = (v - t.xi_min) / t.xi_step;
      const auto k = std::min(static_cast<std::size_t>(pos), t.values.size() - 2);
      const double frac = pos - static_cast<double>(k);
      return std::max(0.0, (1.0 - frac) * t.values[k] + frac * t.values[k + 1]);
    }
  }
  return 0.0;
}

double condition_a_constant_grid(const KernelSpec& spec, double a, const GridPolicy& grid) {
  const Coverage cov = coverage(spec, grid);
  double sup = 0.0;
  grid.for_each(spec.dimension(), [&](std::span<const double> xi) {
    if (!in_coverage(cov, xi)) return;
    sup = std::max(sup, weight_eval(spec, xi) * std::exp(a * norm2(xi)));
  });
  return sup;
}

double condition_a_constant(const KernelSpec& spec, double a, const GridPolicy& grid) {
  if (!(a > 0.0)) throw DomainError("condition_a_constant: a must be positive");
  switch (spec.family()) {
    case KernelFamily::Gaussian: {
      // max_r (a r - pi^2 s^2 r^2) = a^2 / (4 pi^2 s^2)
      const double s = spec.parameter();
      return spec.weight_bound() * std::exp(a * a / (4.0 * kPi * kPi * s * s));
    }
    case KernelFamily::Sinc: {
      // attained at the box corner |xi| = sqrt(d) b
      const double corner = std::sqrt(static_cast<double>(spec.dimension())) *
                            *spec.support_half_width();
      return spec.weight_bound() * std::exp(a * corner);
    }
    case KernelFamily::Tabulated:
      break;
  }
  const Coverage cov = coverage(spec, grid);
  double sup = 0.0;
  double edge = 0.0;
  grid.for_each(1, [&](std::span<const double> xi) {
    if (!in_coverage(cov, xi)) return;
    const double v = weight_eval(spec, xi) * std::exp(a * std::abs(xi[0]));
    sup = std::max(sup, v);
    if (on_outer_shell(cov, xi)) edge = std::max(edge, v);
  });
  if (spec.decay_class() == DecayClass::Unknown &&
      edge > kDecayEdgeTolerance * spec.weight_bound())
    throw ConditionViolated("condition (A): weight times e^{a|xi|} has not decayed at the grid edge");
  return sup;
}

DecayCheck decay_check_dc(const KernelSpec& spec, int n, double a, double eps,
                          const GridPolicy& grid) {
  if (n < 1 || a < 0.0 || !(eps > 0.0))
    throw DomainError("decay_check_dc: need n >= 1, a >= 0, eps > 0");
  const double p = 2.0 * n + spec.dimension() + eps;
  const Coverage cov = coverage(spec, grid);
  DecayCheck out;
  grid.for_each(spec.dimension(), [&](std::span<const double> xi) {
    if (!in_coverage(cov, xi)) return;
    const double r = norm2(xi);
    const double w = weight_eval(spec, xi);
    if (w == 0.0) return;
    const double v = w * (1.0 + std::pow(r, p)) * std::exp(4.0 * kPi * a * r);
    out.l_eps = std::max(out.l_eps, v);
    if (on_outer_shell(cov, xi)) out.edge_value = std::max(out.edge_value, v);
  });
  out.holds = std::isfinite(out.l_eps) &&
              out.edge_value <= kDecayEdgeTolerance * spec.weight_bound();
  return out;
}

GMembershipReport g_membership_grid(const KernelSpec& spec, const Matrix<double>& a,
                                    const GridPolicy& grid) {
  const auto d = static_cast<std::size_t>(spec.dimension());
  if (a.rows() != d || a.cols() != d) throw DomainError("g_membership: matrix must be d x d");
  for (double v : a.data())
    if (!std::isfinite(v)) throw DomainError("g_membership: non-finite matrix entry");
  GMembershipReport rep;
  rep.matrix = a;
  if (!invertible(a)) {
    rep.reason = "A ∉ GL_d";
    return rep;
  }
  const Coverage cov = coverage(spec, grid);
  const double threshold = kWeightThreshold * spec.weight_bound();
  double lambda = std::numeric_limits<double>::infinity();
  grid.for_each(spec.dimension(), [&](std::span<const double> xi) {
    if (!in_coverage(cov, xi)) return;
    const double w = weight_eval(spec, xi);
    if (!(w > threshold)) return;
    const auto eta = transpose_apply(a, xi);
    if (spec.family() == KernelFamily::Tabulated && !in_coverage(cov, eta)) {
      ++rep.skipped_points;
      return;
    }
    ++rep.grid_points;
    lambda = std::min(lambda, weight_eval(spec, eta) / w);
  });
  if (rep.grid_points == 0) {
    rep.reason = "no grid point with positive weight";
    return rep;
  }
  rep.lambda_est = lambda > kLambdaFloor ? lambda : 0.0;
  rep.member = rep.lambda_est > 0.0;
  rep.reason = rep.member ? "grid ratio bounded below" : "grid ratio inf is 0";
  return rep;
}

GMembershipReport g_membership(const KernelSpec& spec, const Matrix<double>& a,
                               const GridPolicy& grid) {
  if (spec.family() == KernelFamily::Tabulated) return g_membership_grid(spec, a, grid);
  const auto d = static_cast<std::size_t>(spec.dimension());
  if (a.rows() != d || a.cols() != d) throw DomainError("g_membership: matrix must be d x d");
  for (double v : a.data())
    if (!std::isfinite(v)) throw DomainError("g_membership: non-finite matrix entry");
  GMembershipReport rep;
  rep.matrix = a;
  rep.analytic = true;
  if (!invertible(a)) {
    rep.reason = "A ∉ GL_d";
    return rep;
  }
  constexpr double tol = 1e-12;
  if (spec.family() == KernelFamily::Gaussian) {
    // weight(A^T xi)/weight(xi) = exp(-pi^2 s^2 (|A^T xi|^2 - |xi|^2))
    const double smax = numerics::svd_small(a).front();
    rep.member = smax <= 1.0 + tol;
    rep.reason = rep.member ? "sigma_max(A) <= 1" : "sigma_max(A) > 1";
  } else {
    // A^T maps the box into itself iff every row of A^T has l1 norm <= 1.
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double row = 0.0;
      for (std::size_t m = 0; m < d; ++m) row += std::abs(a(m, i));
      worst = std::max(worst, row);
    }
    rep.member = worst <= 1.0 + tol;
    rep.reason = rep.member ? "A^T maps the support box into itself"
                            : "A^T moves part of the support box outside it";
  }
  rep.lambda_est = rep.member ? 1.0 : 0.0;
  return rep;
}

SpanReport g_spans_check(const std::vector<Matrix<double>>& members) {
  if (members.empty()) return {false, 0};
  const std::size_t d = members.front().rows();
  Matrix<double> stacked(members.size(), d * d);
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& m = members[k];
    if (m.rows() != d || m.cols() != d)
      throw ValidationError("g_spans_check: matrices must share one square shape");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) stacked(k, i * d + j) = m(i, j);
  }
  SpanReport r;
  r.rank = numerics::matrix_rank(stacked);
  r.spans = r.rank == d * d;
  return r;
}

StripPoint::StripPoint(std::vector<std::complex<double>> z, double bound)
    : z_(std::move(z)), bound_(bound) {
  if (!(bound_ >= 0.0)) throw StripViolation("strip bound must be >= 0");
  double im2 = 0.0;
  for (const auto& v : z_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw StripViolation("strip point has a non-finite coordinate");
    im2 += v.imag() * v.imag();
  }
  const double im = std::sqrt(im2);
  if (bound_ == 0.0 ? im != 0.0 : !(im < bound_))
    throw StripViolation("|Im z| = " + format_double(im) + " outside strip of half-width " +
                         format_double(bound_));
}

StripPoint StripPoint::real(std::vector<double> x) {
  std::vector<std::complex<double>> z(x.begin(), x.end());
  return StripPoint(std::move(z));
}

StripPoint StripPoint::imaginary(std::vector<double> y) {
  std::vector<std::complex<double>> z;
  z.reserve(y.size());
  for (double v : y) z.emplace_back(0.0, v);
  return StripPoint(std::move(z));
}

std::vector<double> StripPoint::imag() const {
  std::vector<double> out;
  out.reserve(z_.size());
  for (const auto& v : z_) out.push_back(v.imag());
  return out;
}

bool StripPoint::is_real() const {
  return std::all_of(z_.begin(), z_.end(), [](const auto& v) { return v.imag() == 0.0; });
}

double admissible_strip(const KernelSpec& spec) {
  switch (spec.decay_class()) {
    case DecayClass::GaussianDecay:
    case DecayClass::CompactSupport:
      return std::numeric_limits<double>::infinity();
    case DecayClass::Unknown:
      return 0.0;
  }
  return 0.0;
}

}  // namespace compop::kernels
