#include "compop/finite_section.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "compop/error.hpp"
#include "compop/format.hpp"
#include "compop/hermite_lab.hpp"
#include "compop/numerics/linalg.hpp"

namespace compop::fs {

namespace {

std::string format_vector(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s + "]";
}

// Pencil solve at precision R; real Gram pairs stay real, complex ones go
// through the 2m real embedding (eigenvalues doubled, max unchanged).
template <typename R>
double solve_pencil(const GramMatrix& g, const GramMatrix& g_f, double eps) {
  using numerics::pencil_max_eigenvalue;
  R lam;
  if (numerics::is_real(g.entries) && numerics::is_real(g_f.entries)) {
    lam = pencil_max_eigenvalue<R>(numerics::real_part<R>(g_f.entries),
                                   numerics::real_part<R>(g.entries), R(eps));
  } else {
    lam = pencil_max_eigenvalue<R>(numerics::real_embedding<R>(g_f.entries),
                                   numerics::real_embedding<R>(g.entries), R(eps));
  }
  const double v = static_cast<double>(lam);
  return std::sqrt(std::max(v, 0.0));
}

std::vector<std::vector<int>> homogeneous_exponents(int d, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(d, 0);
  std::function<void(int, int)> rec = [&](int axis, int left) {
    if (axis == d - 1) {
      cur[axis] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[axis] = v;
      rec(axis + 1, left - v);
    }
  };
  rec(0, n);
  return out;
}

double binomial_double(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void require_member(const KernelSpec& spec, const MapSpec& map, double& lambda) {
  const auto rep = kernels::g_membership(spec, map.linear(), kernels::GridPolicy{});
  if (!rep.member)
    throw ConditionViolated("linear part is not in G(u): " + rep.reason);
  lambda = rep.lambda_est;
}

}  // namespace

MapSpec MapSpec::affine(Matrix<double> a, std::vector<double> b) {
  if (a.rows() == 0 || a.rows() != a.cols()) throw DomainError("affine map: A must be square");
  if (b.size() != a.rows()) throw DomainError("affine map: b has the wrong length");
  for (double v : a.data())
    if (!std::isfinite(v)) throw DomainError("affine map: non-finite entry in A");
  for (double v : b)
    if (!std::isfinite(v)) throw DomainError("affine map: non-finite entry in b");
  MapSpec m;
  m.kind_ = MapKind::Affine;
  m.dimension_ = static_cast<int>(a.rows());
  m.a_ = std::move(a);
  m.b_ = std::move(b);
  return m;
}

MapSpec MapSpec::affine_1d(double alpha, double beta) {
  return affine(Matrix<double>::from_rows({{alpha}}), {beta});
}

MapSpec MapSpec::identity(int dimension) {
  return affine(Matrix<double>::identity(dimension), std::vector<double>(dimension, 0.0));
}

MapSpec MapSpec::quadratic(int dimension) {
  if (dimension < 1) throw DomainError("quadratic map: dimension must be >= 1");
  MapSpec m;
  m.kind_ = MapKind::Quadratic;
  m.dimension_ = dimension;
  return m;
}

MapSpec MapSpec::scaled_exp(double c, int dimension) {
  if (dimension < 1) throw DomainError("scaled_exp map: dimension must be >= 1");
  if (!std::isfinite(c)) throw DomainError("scaled_exp map: c must be finite");
  MapSpec m;
  m.kind_ = MapKind::ScaledExp;
  m.dimension_ = dimension;
  m.c_ = c;
  return m;
}

MapSpec MapSpec::composite(std::vector<MapSpec> parts) {
  if (parts.empty()) throw DomainError("composite map: needs at least one part");
  for (const auto& p : parts)
    if (p.dimension() != parts.front().dimension())
      throw DomainError("composite map: parts have different dimensions");
  MapSpec m;
  m.kind_ = MapKind::Composite;
  m.dimension_ = parts.front().dimension();
  m.parts_ = std::move(parts);
  return m;
}

MapSpec MapSpec::with_domain(DomainBox box) const {
  if (static_cast<int>(box.lo.size()) != dimension_ || static_cast<int>(box.hi.size()) != dimension_)
    throw DomainError("map domain: box dimension mismatch");
  MapSpec m = *this;
  m.domain_ = std::move(box);
  return m;
}

std::vector<double> MapSpec::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_) throw DomainError("map: dimension mismatch");
  std::vector<double> y(x.begin(), x.end());
  switch (kind_) {
    case MapKind::Affine:
      y = a_ * x;
      for (int i = 0; i < dimension_; ++i) y[i] += b_[i];
      break;
    case MapKind::Quadratic:
      for (auto& v : y) v *= v;
      break;
    case MapKind::ScaledExp:
      for (auto& v : y) v = c_ * std::exp(v);
      break;
    case MapKind::Composite:
      for (const auto& p : parts_) y = p.apply(y);
      break;
  }
  return y;
}

std::vector<std::complex<double>> MapSpec::apply_complex(
    std::span<const std::complex<double>> z) const {
  if (kind_ != MapKind::Affine) throw UnsupportedMap("apply_complex: only affine maps extend");
  if (static_cast<int>(z.size()) != dimension_) throw DomainError("map: dimension mismatch");
  std::vector<std::complex<double>> w(dimension_);
  for (int i = 0; i < dimension_; ++i) {
    std::complex<double> s = b_[i];
    for (int j = 0; j < dimension_; ++j) s += a_(i, j) * z[j];
    w[i] = s;
  }
  return w;
}

std::string MapSpec::descriptor() const {
  std::string d = "d=" + std::to_string(dimension_);
  switch (kind_) {
    case MapKind::Affine: {
      std::string rows;
      for (std::size_t i = 0; i < a_.rows(); ++i) {
        if (i) rows += '/';
        for (std::size_t j = 0; j < a_.cols(); ++j) {
          if (j) rows += ' ';
          rows += format_double(a_(i, j));
        }
      }
      return "affine(A=[" + rows + "];b=" + format_vector(b_) + ")";
    }
    case MapKind::Quadratic: return "quadratic(" + d + ")";
    case MapKind::ScaledExp: return "scaled_exp(c=" + format_double(c_) + ";" + d + ")";
    case MapKind::Composite: {
      std::string s = "composite(";
      for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) s += '|';
        s += parts_[i].descriptor();
      }
      return s + ")";
    }
  }
  return "map";
}

Pencil kf_pencil(const KernelSpec& spec, const MapSpec& map, const PointCloud& cloud) {
  if (cloud.dimension() != spec.dimension() || map.dimension() != spec.dimension())
    throw DomainError("kf_pencil: kernel, map and cloud dimensions differ");
  if (map.domain())
    for (const auto& p : cloud.points())
      if (!map.domain()->contains(p)) throw DomainError("kf_pencil: cloud point outside U");
  std::vector<std::vector<double>> image;
  image.reserve(cloud.size());
  for (const auto& p : cloud.points()) {
    auto y = map.apply(p);
    for (double v : y)
      if (!std::isfinite(v)) throw DomainError("kf_pencil: f(x) is not finite");
    image.push_back(std::move(y));
  }
  Pencil out;
  out.g = rkhs::gram(spec, cloud);
  out.g_f = rkhs::gram_of_points(spec, image);
  for (std::size_t i = 0; i < image.size() && !out.degenerate_image; ++i)
    for (std::size_t j = i + 1; j < image.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < image[i].size(); ++k)
        s += (image[i][k] - image[j][k]) * (image[i][k] - image[j][k]);
      if (std::sqrt(s) <= PointCloud::kMinSeparation) {
        out.degenerate_image = true;
        out.warning = "f(x_" + std::to_string(i) + ") and f(x_" + std::to_string(j) +
                      ") coincide within 1e-10";
        break;
      }
    }
  return out;
}

double default_jitter(const GramMatrix& g) {
  if (g.size() == 0) return 0.0;
  return 1e-12 * numerics::trace(g.entries).real() / static_cast<double>(g.size());
}

double norm_lower_bound(const GramMatrix& g, const GramMatrix& g_f, double eps,
                        Precision precision) {
  if (g.size() != g_f.size()) throw DomainError("norm_lower_bound: size mismatch");
  if (!(eps >= 0.0)) throw DomainError("norm_lower_bound: eps must be nonnegative");
  if (g.size() == 0) return 0.0;
  switch (precision) {
    case Precision::Double: return solve_pencil<double>(g, g_f, eps);
    case Precision::Quad: return solve_pencil<numerics::quad_float>(g, g_f, eps);
    case Precision::Extended: return solve_pencil<numerics::extended_float>(g, g_f, eps);
  }
  return solve_pencil<double>(g, g_f, eps);
}

NormEstimate estimate_norm(const KernelSpec& spec, const MapSpec& map, const PointCloud& cloud,
                           const JitterPolicy& policy) {
  const Pencil p = kf_pencil(spec, map, cloud);
  NormEstimate e;
  e.cloud_id = cloud.id();
  e.m = cloud.size();
  e.precision = policy.precision;
  e.degenerate_image = p.degenerate_image;
  const double tr = numerics::trace(p.g.entries).real();
  const double ceiling = policy.ceiling_relative * tr;
  double eps = policy.initial.value_or(default_jitter(p.g));
  while (true) {
    try {
      e.value = norm_lower_bound(p.g, p.g_f, eps, policy.precision);
      e.epsilon = eps;
      return e;
    } catch (const CholeskyFailure&) {
      eps = eps > 0.0 ? eps * policy.growth : default_jitter(p.g);
      ++e.escalations;
      if (eps > ceiling) {
        e.epsilon = eps / policy.growth;
        e.value = std::numeric_limits<double>::quiet_NaN();
        e.error = "jitter escalation exhausted at " + format_double(ceiling);
        return e;
      }
    }
  }
}

double two_point_closed_form(double u0, double g, double h, double eps) {
  // u0 - g is exact for g near u0; adding eps last keeps it that way
  return std::max((u0 + h) / ((u0 + g) + eps), (u0 - h) / ((u0 - g) + eps));
}

std::string NormEstimateSeries::to_csv() const {
  std::ostringstream os;
  os << "cloud_id,m,epsilon,estimate,map_descriptor,kernel_descriptor,precision\n";
  for (const auto& e : estimates)
    os << e.cloud_id << ',' << e.m << ',' << format_double(e.epsilon) << ','
       << format_double(e.value) << ',' << map_descriptor << ',' << kernel_descriptor << ','
       << numerics::to_string(e.precision) << '\n';
  return os.str();
}

NormEstimateSeries divergence_scan(const KernelSpec& spec, const MapSpec& map,
                                   const std::vector<PointCloud>& clouds,
                                   const JitterPolicy& policy, int jobs) {
  NormEstimateSeries s;
  s.map_descriptor = map.descriptor();
  s.kernel_descriptor = spec.descriptor();
  s.estimates.resize(clouds.size());

  std::atomic<std::size_t> next{0};
  std::vector<std::string> failures(clouds.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < clouds.size(); i = next++) {
      try {
        s.estimates[i] = estimate_norm(spec, map, clouds[i], policy);
      } catch (const Error& ex) {
        failures[i] = ex.what();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(clouds.size(), 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < clouds.size(); ++i)
    if (!failures[i].empty()) throw DomainError("divergence_scan: cloud " + clouds[i].id() + ": " + failures[i]);

  s.nested = true;
  for (std::size_t i = 1; i < clouds.size(); ++i)
    if (!clouds[i].contains_all_of(clouds[i - 1])) s.nested = false;
  s.monotone = true;
  if (s.nested)
    for (std::size_t i = 1; i < clouds.size(); ++i) {
      const double prev = s.estimates[i - 1].value;
      if (s.estimates[i].value < prev - 1e-6 * std::max(1.0, prev)) s.monotone = false;
    }
  return s;
}

std::vector<double> compactness_probe(const KernelSpec& spec, const MapSpec& map,
                                      const std::vector<double>& separations) {
  if (!map.is_affine()) throw UnsupportedMap("compactness_probe: map must be affine");
  if (map.dimension() != spec.dimension())
    throw DomainError("compactness_probe: map and kernel dimensions differ");
  double lambda = 0.0;
  require_member(spec, map, lambda);
  std::vector<double> out;
  out.reserve(separations.size());
  const int d = spec.dimension();
  for (double s : separations) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("compactness_probe: bad separation");
    std::vector<double> diff(d, 0.0);
    diff[0] = s;
    const auto image = map.linear() * std::span<const double>(diff);
    out.push_back(2.0 * spec.u0() - 2.0 * kernels::u_eval(spec, image).real());
  }
  return out;
}

SymmetricPowerMatrix symmetric_power(const Matrix<double>& a, int n) {
  if (a.rows() == 0 || a.rows() != a.cols()) throw DomainError("symmetric_power: A must be square");
  if (n < 1) throw DomainError("symmetric_power: degree must be positive");
  const int d = static_cast<int>(a.rows());
  if (binomial_double(n + d - 1, d - 1) > static_cast<double>(kSymmetricPowerCap))
    throw SizeError("symmetric_power: basis dimension exceeds 500");

  SymmetricPowerMatrix out;
  out.base = a;
  out.degree = n;
  out.basis = homogeneous_exponents(d, n);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t k = 0; k < out.basis.size(); ++k) index[out.basis[k]] = k;
  out.matrix = Matrix<double>(out.basis.size(), out.basis.size());

  for (std::size_t col = 0; col < out.basis.size(); ++col) {
    std::map<std::vector<int>, double> poly{{std::vector<int>(d, 0), 1.0}};
    for (int i = 0; i < d; ++i)
      for (int rep = 0; rep < out.basis[col][i]; ++rep) {
        // multiply by xi_i -> sum_m A[m][i] xi_m
        std::map<std::vector<int>, double> next;
        for (const auto& [mono, c] : poly)
          for (int m = 0; m < d; ++m) {
            if (a(m, i) == 0.0) continue;
            auto e = mono;
            ++e[m];
            next[e] += c * a(m, i);
          }
        poly = std::move(next);
      }
    for (const auto& [mono, c] : poly) out.matrix(index.at(mono), col) = c;
  }
  return out;
}

std::vector<std::complex<double>> general_eigenvalues(const Matrix<double>& a) {
  if (a.rows() != a.cols()) throw DomainError("general_eigenvalues: matrix must be square");
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericError("general_eigenvalues: no convergence");
  std::vector<std::complex<double>> out(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::abs(x) != std::abs(y) ? std::abs(x) > std::abs(y)
                                      : (x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag());
  });
  return out;
}

EigenGrowthReport eigen_growth_check(const KernelSpec& spec, const MapSpec& map,
                                     const StripPoint& z, int n_max) {
  if (!map.is_affine()) throw UnsupportedMap("eigen_growth_check: map must be affine");
  if (map.dimension() != spec.dimension() || z.dimension() != spec.dimension())
    throw DomainError("eigen_growth_check: dimension mismatch");
  if (n_max < 1) throw DomainError("eigen_growth_check: n_max must be positive");
  EigenGrowthReport rep;
  require_member(spec, map, rep.lambda);
  rep.eigenvalues = general_eigenvalues(map.linear());

  std::vector<std::complex<double>> minus_z(z.z());
  for (auto& v : minus_z) v = -v;
  const auto fz = map.apply_complex(z.z());
  const auto left = hermite::growth_rate_series(spec, StripPoint(minus_z), n_max);
  const auto right = hermite::growth_rate_series(spec, StripPoint(fz), n_max);
  const double scale = 1.0 / std::sqrt(rep.lambda);

  for (const auto& alpha : rep.eigenvalues)
    for (int n = 1; n <= n_max; ++n) {
      EigenGrowthRow row;
      row.n = n;
      row.alpha = alpha;
      row.lhs = std::pow(std::abs(alpha), n);
      row.rhs = scale * left.entries[n - 1].rho * right.entries[n - 1].rho;
      row.margin = row.rhs - row.lhs;
      row.holds = row.lhs <= row.rhs * (1.0 + 1e-10);
      rep.all_hold = rep.all_hold && row.holds;
      rep.rows.push_back(row);
    }
  return rep;
}

PointCloud merging_pair(std::vector<double> x0, double delta, std::string id) {
  if (x0.empty()) throw DomainError("merging_pair: empty base point");
  auto x1 = x0;
  x1[0] += delta;
  if (id.empty()) id = "pair(x0=" + format_vector(x0) + ";delta=" + format_double(delta) + ")";
  return PointCloud({std::move(x0), std::move(x1)}, std::nullopt, std::move(id));
}

PointCloud random_cloud(int dimension, std::size_t m, const DomainBox& box,
                        numerics::CounterRng& rng, std::string id) {
  if (dimension < 1 || m < 1) throw DomainError("random_cloud: need d >= 1 and m >= 1");
  if (static_cast<int>(box.lo.size()) != dimension || static_cast<int>(box.hi.size()) != dimension)
    throw DomainError("random_cloud: box dimension mismatch");
  std::vector<std::vector<double>> pts;
  while (pts.size() < m) {
    std::vector<double> p(dimension);
    for (int k = 0; k < dimension; ++k) p[k] = rng.uniform(box.lo[k], box.hi[k]);
    const bool clash = std::any_of(pts.begin(), pts.end(), [&](const auto& q) {
      double s = 0.0;
      for (int k = 0; k < dimension; ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
      return std::sqrt(s) <= PointCloud::kMinSeparation;
    });
    if (!clash) pts.push_back(std::move(p));
  }
  if (id.empty()) id = "random-" + std::to_string(m);
  return PointCloud(std::move(pts), box, std::move(id));
}

std::vector<PointCloud> nested_random(int dimension, const std::vector<std::size_t>& sizes,
                                      const DomainBox& box, std::uint64_t seed,
                                      const std::string& id_prefix) {
  if (sizes.empty()) return {};
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw DomainError("nested_random: sizes must be nondecreasing");
  numerics::CounterRng rng(seed);
  const auto master = random_cloud(dimension, sizes.back(), box, rng, id_prefix);
  std::vector<PointCloud> out;
  for (std::size_t m : sizes) {
    std::vector<std::vector<double>> pts(master.points().begin(), master.points().begin() + m);
    out.emplace_back(std::move(pts), box, id_prefix + "-" + std::to_string(m));
  }
  return out;
}

PointCloud equispaced(double lo, double hi, std::size_t m, std::string id) {
  if (m < 2 || !(hi > lo)) throw DomainError("equispaced: need m >= 2 and hi > lo");
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < m; ++i)
    pts.push_back({lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1)});
  if (id.empty()) id = "equispaced-" + std::to_string(m);
  return PointCloud(std::move(pts), DomainBox{{lo}, {hi}}, std::move(id));
}

}  // namespace compop::fs
