#include "compop/serialization.hpp"

#include <sstream>

#include "compop/error.hpp"
#include "compop/format.hpp"

namespace compop::io {

namespace {

const json& field(const json& j, const char* key, const char* where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + ": expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ValidationError(std::string(what) + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ValidationError(std::string(what) + ": expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

kernels::DecayClass parse_decay(const std::string& s) {
  if (s == "gaussian_decay") return kernels::DecayClass::GaussianDecay;
  if (s == "compact_support") return kernels::DecayClass::CompactSupport;
  if (s == "unknown") return kernels::DecayClass::Unknown;
  throw ValidationError("unknown decay class '" + s + "'");
}

}  // namespace

json to_json(const kernels::KernelSpec& spec) {
  json j;
  j["family"] = kernels::to_string(spec.family());
  j["dimension"] = spec.dimension();
  if (spec.family() == kernels::KernelFamily::Tabulated) {
    const auto& t = spec.table();
    j["xi_min"] = t.xi_min;
    j["xi_step"] = t.xi_step;
    j["values"] = t.values;
    if (t.declared_bound) j["declared_bound"] = *t.declared_bound;
    j["u0"] = spec.u0();
    j["decay"] = kernels::to_string(t.decay);
  } else {
    j["scale_or_bandwidth"] = spec.parameter();
  }
  return j;
}

kernels::KernelSpec kernel_from_json(const json& j) {
  const auto& fam = field(j, "family", "kernel");
  if (!fam.is_string()) throw ValidationError("kernel.family: expected a string");
  const std::string family = fam.get<std::string>();
  const int d = j.contains("dimension") ? integer(j["dimension"], "kernel.dimension") : 1;
  if (family == "gaussian" || family == "sinc") {
    const double p = j.contains("scale_or_bandwidth")
                         ? number(j["scale_or_bandwidth"], "kernel.scale_or_bandwidth")
                         : 1.0;
    return family == "gaussian" ? kernels::KernelSpec::gaussian(p, d)
                                : kernels::KernelSpec::sinc(p, d);
  }
  if (family == "tabulated") {
    if (d != 1) throw ValidationError("tabulated kernels are one-dimensional");
    kernels::TabulatedWeight t;
    t.xi_min = number(field(j, "xi_min", "kernel"), "kernel.xi_min");
    t.xi_step = number(field(j, "xi_step", "kernel"), "kernel.xi_step");
    t.values = numbers(field(j, "values", "kernel"), "kernel.values");
    if (j.contains("declared_bound")) t.declared_bound = number(j["declared_bound"], "kernel.declared_bound");
    if (j.contains("u0")) t.u0 = number(j["u0"], "kernel.u0");
    if (j.contains("decay")) {
      if (!j["decay"].is_string()) throw ValidationError("kernel.decay: expected a string");
      t.decay = parse_decay(j["decay"].get<std::string>());
    }
    return kernels::KernelSpec::tabulated(std::move(t));
  }
  throw ValidationError("kernel.family: unknown family '" + family + "'");
}

json to_json(const kernels::GridPolicy& grid) {
  return json{{"extent", grid.extent}, {"points_per_axis", grid.points_per_axis}};
}

kernels::GridPolicy grid_from_json(const json& j) {
  kernels::GridPolicy g;
  if (!j.is_object()) throw ValidationError("grid: expected an object");
  if (j.contains("extent")) g.extent = number(j["extent"], "grid.extent");
  if (j.contains("points_per_axis")) g.points_per_axis = integer(j["points_per_axis"], "grid.points_per_axis");
  if (!(g.extent > 0.0) || g.points_per_axis < 2)
    throw ValidationError("grid: need extent > 0 and points_per_axis >= 2");
  return g;
}

json to_json(const rkhs::DomainBox& box) { return json{{"lo", box.lo}, {"hi", box.hi}}; }

rkhs::DomainBox box_from_json(const json& j) {
  rkhs::DomainBox b{numbers(field(j, "lo", "box"), "box.lo"), numbers(field(j, "hi", "box"), "box.hi")};
  if (b.lo.size() != b.hi.size()) throw ValidationError("box: lo and hi lengths differ");
  for (std::size_t i = 0; i < b.lo.size(); ++i)
    if (!(b.hi[i] >= b.lo[i])) throw ValidationError("box: hi < lo");
  return b;
}

json to_json(const rkhs::PointCloud& cloud) {
  json j;
  j["points"] = cloud.points();
  if (cloud.domain()) j["domain"] = to_json(*cloud.domain());
  if (!cloud.id().empty()) j["id"] = cloud.id();
  return j;
}

rkhs::PointCloud cloud_from_json(const json& j) {
  const auto& pts = field(j, "points", "cloud");
  if (!pts.is_array()) throw ValidationError("cloud.points: expected an array");
  std::vector<std::vector<double>> points;
  for (const auto& p : pts) points.push_back(numbers(p, "cloud.points"));
  std::optional<rkhs::DomainBox> domain;
  if (j.contains("domain")) domain = box_from_json(j["domain"]);
  std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
  return rkhs::PointCloud(std::move(points), std::move(domain), std::move(id));
}

json to_json(const numerics::Matrix<double>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

numerics::Matrix<double> matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix: expected a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(numbers(r, "matrix row"));
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw ValidationError("matrix: ragged rows");
  return numerics::Matrix<double>::from_rows(rows);
}

json to_json(const fs::MapSpec& map) {
  json j;
  switch (map.kind()) {
    case fs::MapKind::Affine:
      j["kind"] = "affine";
      j["A"] = to_json(map.linear());
      j["b"] = map.offset();
      break;
    case fs::MapKind::Quadratic: j["kind"] = "quadratic"; break;
    case fs::MapKind::ScaledExp:
      j["kind"] = "scaled_exp";
      j["c"] = map.exp_scale();
      break;
    case fs::MapKind::Composite: {
      j["kind"] = "composite";
      json parts = json::array();
      for (const auto& p : map.parts()) parts.push_back(to_json(p));
      j["parts"] = std::move(parts);
      break;
    }
  }
  if (map.domain()) j["domain"] = to_json(*map.domain());
  return j;
}

fs::MapSpec map_from_json(const json& j, int dimension) {
  const auto& k = field(j, "kind", "map");
  if (!k.is_string()) throw ValidationError("map.kind: expected a string");
  const std::string kind = k.get<std::string>();
  fs::MapSpec m = fs::MapSpec::identity(dimension);
  try {
    if (kind == "affine") {
      // 1-D shorthand {alpha, beta}
      if (j.contains("alpha")) {
        if (dimension != 1) throw ValidationError("map: alpha/beta shorthand needs d = 1");
        m = fs::MapSpec::affine_1d(number(j["alpha"], "map.alpha"),
                                   j.contains("beta") ? number(j["beta"], "map.beta") : 0.0);
      } else {
        auto a = matrix_from_json(field(j, "A", "map"));
        auto b = j.contains("b") ? numbers(j["b"], "map.b") : std::vector<double>(a.rows(), 0.0);
        m = fs::MapSpec::affine(std::move(a), std::move(b));
      }
    } else if (kind == "identity") {
      m = fs::MapSpec::identity(dimension);
    } else if (kind == "quadratic") {
      m = fs::MapSpec::quadratic(dimension);
    } else if (kind == "scaled_exp") {
      m = fs::MapSpec::scaled_exp(j.contains("c") ? number(j["c"], "map.c") : 1.0, dimension);
    } else if (kind == "composite") {
      const auto& parts = field(j, "parts", "map");
      if (!parts.is_array()) throw ValidationError("map.parts: expected an array");
      std::vector<fs::MapSpec> list;
      for (const auto& p : parts) list.push_back(map_from_json(p, dimension));
      m = fs::MapSpec::composite(std::move(list));
    } else {
      throw ValidationError("map.kind: unknown kind '" + kind + "'");
    }
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (m.dimension() != dimension) throw ValidationError("map: dimension differs from the kernel's");
  if (j.contains("domain")) m = m.with_domain(box_from_json(j["domain"]));
  return m;
}

std::string gram_to_csv(const rkhs::GramMatrix& g) {
  std::ostringstream os;
  const std::size_t m = g.size();
  for (std::size_t j = 0; j < m; ++j) {
    if (j) os << ',';
    os << "re" << j << ",im" << j;
  }
  os << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j) os << ',';
      os << format_double(g.entries(i, j).real()) << ',' << format_double(g.entries(i, j).imag());
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace compop::io
