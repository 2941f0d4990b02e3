#include "compop/rkhs_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "compop/error.hpp"
#include "compop/format.hpp"

namespace compop::rkhs {

namespace {

constexpr double kPi = std::numbers::pi;

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// One-dimensional factor of the weight for the separable built-in families.
double weight_factor_1d(const KernelSpec& spec, double xi) {
  const double s = spec.parameter();
  if (spec.family() == kernels::KernelFamily::Gaussian)
    return std::sqrt(kPi) * s * std::exp(-kPi * kPi * s * s * xi * xi);
  return kPi / s;
}

}  // namespace

bool DomainBox::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

PointCloud::PointCloud(std::vector<std::vector<double>> points, std::optional<DomainBox> domain,
                       std::string id)
    : points_(std::move(points)), domain_(std::move(domain)), id_(std::move(id)) {
  if (points_.empty()) throw DegenerateCloud("point cloud is empty");
  dimension_ = static_cast<int>(points_.front().size());
  if (dimension_ < 1) throw DomainError("point cloud: points must have dimension >= 1");
  for (const auto& p : points_) {
    if (static_cast<int>(p.size()) != dimension_)
      throw DomainError("point cloud: mixed point dimensions");
    for (double v : p)
      if (!std::isfinite(v)) throw DomainError("point cloud: non-finite coordinate");
  }
  if (domain_) {
    if (static_cast<int>(domain_->lo.size()) != dimension_ ||
        static_cast<int>(domain_->hi.size()) != dimension_)
      throw DomainError("point cloud: domain box dimension mismatch");
    for (const auto& p : points_)
      if (!domain_->contains(p)) throw DomainError("point cloud: point outside the domain U");
  }
  if (points_.size() > 1 && min_separation() <= kMinSeparation)
    throw DegenerateCloud("point cloud: two points closer than 1e-10");
}

double PointCloud::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      best = std::min(best, distance(points_[i], points_[j]));
  return best;
}

bool PointCloud::contains_all_of(const PointCloud& other) const {
  return std::all_of(other.points_.begin(), other.points_.end(), [&](const auto& p) {
    return std::find(points_.begin(), points_.end(), p) != points_.end();
  });
}

GramMatrix gram_of_points(const KernelSpec& spec, const std::vector<std::vector<double>>& pts) {
  const std::size_t m = pts.size();
  GramMatrix g;
  g.entries = Matrix<std::complex<double>>(m, m);
  const std::complex<double> diag = kernels::u_eval(spec, std::vector<double>(spec.dimension(), 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    g.entries(i, i) = diag;
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto v = kernels::u_eval(spec, difference(pts[i], pts[j]));
      g.entries(i, j) = v;
      g.entries(j, i) = std::conj(v);
    }
  }
  return g;
}

GramMatrix gram(const KernelSpec& spec, const PointCloud& cloud) {
  if (cloud.dimension() != spec.dimension())
    throw DomainError("gram: cloud and kernel dimensions differ");
  return gram_of_points(spec, cloud.points());
}

QuadratureScheme default_scheme(const KernelSpec& spec) {
  switch (spec.family()) {
    case kernels::KernelFamily::Gaussian:
      return numerics::gauss_hermite_nodes(160);
    case kernels::KernelFamily::Sinc: {
      const double b = *spec.support_half_width();
      const double delta = 1e-9 * b;
      return numerics::trapezoid_scheme(-b + delta, b - delta, 64, 6);
    }
    case kernels::KernelFamily::Tabulated: {
      const auto& t = spec.table();
      return numerics::trapezoid_scheme(t.xi_min, t.xi_max(),
                                        static_cast<int>(t.values.size() - 1), 1);
    }
  }
  return numerics::gauss_hermite_nodes(160);
}

SpectralQuadrature spectral_quadrature(const KernelSpec& spec, const QuadratureScheme& base) {
  using numerics::QuadratureKind;
  std::vector<double> nodes;
  std::vector<double> weights;
  const auto n = base.nodes.size();
  switch (spec.family()) {
    case kernels::KernelFamily::Gaussian:
      if (base.kind == QuadratureKind::GaussHermite) {
        const double s = spec.parameter();
        for (std::size_t k = 0; k < n; ++k) {
          nodes.push_back(base.nodes[k] / (kPi * s));
          weights.push_back(base.weights[k] / std::sqrt(kPi));
        }
      } else {
        for (std::size_t k = 0; k < n; ++k) {
          nodes.push_back(base.nodes[k]);
          weights.push_back(base.weights[k] * weight_factor_1d(spec, base.nodes[k]));
        }
      }
      break;
    case kernels::KernelFamily::Sinc: {
      if (base.kind == QuadratureKind::GaussHermite)
        throw QuadratureDomainError("sinc weight: Gauss-Hermite nodes leave the support");
      const double b = *spec.support_half_width();
      for (std::size_t k = 0; k < n; ++k) {
        if (!(std::abs(base.nodes[k]) < b))
          throw QuadratureDomainError("sinc weight: quadrature node on or outside the support edge");
        nodes.push_back(base.nodes[k]);
        weights.push_back(base.weights[k] * weight_factor_1d(spec, base.nodes[k]));
      }
      break;
    }
    case kernels::KernelFamily::Tabulated: {
      if (base.kind == QuadratureKind::GaussHermite)
        throw QuadratureDomainError("tabulated weight: Gauss-Hermite nodes leave the table");
      const auto& t = spec.table();
      for (std::size_t k = 0; k < n; ++k) {
        const double xi = base.nodes[k];
        if (xi < t.xi_min || xi > t.xi_max())
          throw QuadratureDomainError("tabulated weight: quadrature node outside the table");
        nodes.push_back(xi);
        weights.push_back(base.weights[k] * kernels::weight_eval(spec, std::span(&xi, 1)));
      }
      break;
    }
  }

  SpectralQuadrature q;
  q.dimension = spec.dimension();
  const int d = spec.dimension();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  if (total > 4'000'000) throw SizeError("spectral_quadrature: tensor rule too large");
  q.nodes.reserve(total);
  q.weights.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> xi(d);
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      xi[i] = nodes[idx[i]];
      w *= weights[idx[i]];
    }
    q.nodes.push_back(std::move(xi));
    q.weights.push_back(w);
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
  }
  return q;
}

FourierFunction FourierFunction::kernel_section(std::span<const double> x) {
  FourierFunction f;
  f.terms_.push_back({1.0, std::vector<std::complex<double>>(x.begin(), x.end()), {}});
  f.description_ = "k_x";
  return f;
}

FourierFunction FourierFunction::kernel_combination(
    const std::vector<std::complex<double>>& coefficients,
    const std::vector<std::vector<double>>& points) {
  if (coefficients.size() != points.size())
    throw DomainError("kernel_combination: coefficient/point count mismatch");
  FourierFunction f;
  for (std::size_t j = 0; j < points.size(); ++j)
    f.terms_.push_back(
        {coefficients[j], std::vector<std::complex<double>>(points[j].begin(), points[j].end()), {}});
  f.description_ = "sum_j c_j k_{x_j} (" + std::to_string(points.size()) + " terms)";
  return f;
}

FourierFunction FourierFunction::exponential(const StripPoint& z) {
  FourierFunction f;
  f.terms_.push_back({1.0, z.z(), {}});
  f.description_ = "e_z";
  return f;
}

FourierFunction FourierFunction::monomial_exponential(std::complex<double> coefficient,
                                                      std::vector<int> exponent,
                                                      const StripPoint& z) {
  if (exponent.size() != z.z().size())
    throw DomainError("monomial_exponential: exponent/point dimension mismatch");
  for (int e : exponent)
    if (e < 0) throw DomainError("monomial_exponential: negative exponent");
  FourierFunction f;
  f.terms_.push_back({coefficient, z.z(), std::move(exponent)});
  f.description_ = "xi^alpha e_z";
  return f;
}

FourierFunction FourierFunction::from_transform(
    std::function<std::complex<double>(std::span<const double>)> transform,
    std::string description) {
  FourierFunction f;
  f.transform_ = std::move(transform);
  f.description_ = std::move(description);
  return f;
}

FourierFunction& FourierFunction::operator+=(const FourierFunction& other) {
  if (transform_ || other.transform_)
    throw DomainError("FourierFunction: cannot add transform-backed functions");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  description_ += " + " + other.description_;
  return *this;
}

FourierFunction FourierFunction::scaled(std::complex<double> c) const {
  FourierFunction f = *this;
  if (f.transform_) {
    auto inner = f.transform_;
    f.transform_ = [inner, c](std::span<const double> xi) { return c * inner(xi); };
  }
  for (auto& t : f.terms_) t.coefficient *= c;
  return f;
}

bool FourierFunction::is_kernel_combination() const {
  if (transform_) return false;
  return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) {
    const bool real_point = std::all_of(t.point.begin(), t.point.end(),
                                        [](const auto& v) { return v.imag() == 0.0; });
    const bool constant = std::all_of(t.exponent.begin(), t.exponent.end(),
                                      [](int e) { return e == 0; });
    return real_point && constant;
  });
}

std::complex<double> FourierFunction::psi(const KernelSpec& spec,
                                          std::span<const double> xi) const {
  if (transform_) {
    const double w = kernels::weight_eval(spec, xi);
    if (!(w > 0.0))
      throw QuadratureDomainError("psi: weight vanishes where a transform is divided by it");
    return transform_(xi) / w;
  }
  std::complex<double> s = 0.0;
  for (const auto& t : terms_) {
    std::complex<double> phase = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) phase += t.point[i] * xi[i];
    // e^{-2 pi i z . xi}
    std::complex<double> v = t.coefficient * std::exp(std::complex<double>(0.0, -2.0 * kPi) * phase);
    for (std::size_t i = 0; i < t.exponent.size(); ++i)
      if (t.exponent[i] != 0) v *= std::pow(xi[i], t.exponent[i]);
    s += v;
  }
  return s;
}

std::complex<double> FourierFunction::transform(const KernelSpec& spec,
                                                std::span<const double> xi) const {
  if (transform_) return transform_(xi);
  return kernels::weight_eval(spec, xi) * psi(spec, xi);
}

std::complex<double> FourierFunction::evaluate(const KernelSpec& spec,
                                               std::span<const double> x) const {
  if (!is_kernel_combination())
    throw DomainError("FourierFunction::evaluate: only finite kernel combinations are supported");
  std::complex<double> s = 0.0;
  std::vector<double> diff(x.size());
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - t.point[i].real();
    s += t.coefficient * kernels::u_eval(spec, diff);
  }
  return s;
}

std::complex<double> rkhs_inner_fourier(const KernelSpec& spec, const FourierFunction& g,
                                        const FourierFunction& h, const SpectralQuadrature& quad) {
  if (quad.dimension != spec.dimension())
    throw DomainError("rkhs_inner_fourier: quadrature dimension mismatch");
  std::complex<double> s = 0.0;
  double gg = 0.0, hh = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const auto pg = g.psi(spec, quad.nodes[k]);
    const auto ph = h.psi(spec, quad.nodes[k]);
    s += quad.weights[k] * std::conj(pg) * ph;
    gg += quad.weights[k] * std::norm(pg);
    hh += quad.weights[k] * std::norm(ph);
  }
  if (!std::isfinite(gg) || !std::isfinite(hh))
    throw QuadratureDomainError("rkhs_inner_fourier: infinite L^2(1/weight) norm on the scheme");
  return s;
}

std::complex<double> rkhs_inner_fourier(const KernelSpec& spec, const FourierFunction& g,
                                        const FourierFunction& h, const QuadratureScheme& quad) {
  return rkhs_inner_fourier(spec, g, h, spectral_quadrature(spec, quad));
}

double feature_distance(const KernelSpec& spec, std::span<const double> x,
                        std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("feature_distance: dimension mismatch");
  const double r = 2.0 * spec.u0() - 2.0 * kernels::u_eval(spec, difference(x, y)).real();
  if (r < -1e-12)
    throw PositivityViolation("feature_distance: negative radicand " + format_double(r) +
                              " (kernel is not positive definite)");
  return std::sqrt(std::max(r, 0.0));
}

double derivative_identity_residual(const KernelSpec& spec, const StripPoint& z, int axis,
                                    double eps, const QuadratureScheme& quad) {
  if (z.dimension() != spec.dimension())
    throw DomainError("derivative_identity_residual: dimension mismatch");
  if (axis < 0 || axis >= spec.dimension())
    throw DomainError("derivative_identity_residual: axis index out of range");
  if (!(eps > 0.0)) throw DomainError("derivative_identity_residual: eps must be positive");
  if (std::abs(z.bound()) > kernels::admissible_strip(spec) ||
      (kernels::admissible_strip(spec) == 0.0 && !z.is_real()))
    throw StripViolation("derivative_identity_residual: strip exceeds the kernel's decay class");
  const auto sq = spectral_quadrature(spec, quad);
  const auto im = z.imag();
  double acc = 0.0;
  for (std::size_t k = 0; k < sq.nodes.size(); ++k) {
    const auto& xi = sq.nodes[k];
    const double theta = 2.0 * kPi * eps * xi[axis];
    // (e^{-i theta} - 1) / eps + 2 pi i xi_j without cancellation in e^{-i theta} - 1
    const double half = std::sin(0.5 * theta);
    const std::complex<double> diff(-2.0 * half * half / eps,
                                    (-std::sin(theta) + theta) / eps);
    double growth = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) growth += im[i] * xi[i];
    acc += sq.weights[k] * std::norm(diff) * std::exp(4.0 * kPi * growth);
  }
  return std::sqrt(acc);
}

}  // namespace compop::rkhs
