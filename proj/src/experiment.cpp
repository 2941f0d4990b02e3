#include "compop/experiment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "compop/error.hpp"
#include "compop/format.hpp"
#include "compop/hermite_lab.hpp"
#include "compop/numerics/linalg.hpp"
#include "compop/numerics/prng.hpp"
#include "compop/schema.hpp"
#include "compop/serialization.hpp"

namespace compop::cli {

namespace {

using numerics::BigRational;

const ExperimentDescriptor& descriptor_for(ExperimentKind k) {
  for (const auto& d : list_experiments())
    if (d.name == to_string(k)) return d;
  throw ValidationError("no descriptor for experiment");
}

// Adds the provenance columns kernel, map, cloud_id, epsilon, precision to a
// CSV whose rows all share the same map/epsilon/precision.
std::string with_provenance(const std::string& csv, const std::vector<std::string>& cloud_ids,
                            const std::string& kernel, const std::string& map, double epsilon,
                            numerics::Precision precision) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out << line << ",kernel,map,cloud_id,epsilon,precision\n";
      header = false;
      continue;
    }
    const std::string id = row < cloud_ids.size() ? cloud_ids[row] : "none";
    out << line << ',' << kernel << ',' << map << ',' << id << ',' << format_double(epsilon) << ','
        << numerics::to_string(precision) << '\n';
    ++row;
  }
  return out.str();
}

std::vector<double> numbers_of(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

std::string format_point(const std::vector<double>& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ' ';
    s += format_double(x[i]);
  }
  return s;
}

struct Output {
  std::filesystem::path dir;
  std::vector<std::string> files;
  void write(const std::string& name, const std::string& contents) {
    write_atomic(dir / name, contents);
    files.push_back(name);
  }
};

json estimate_cells(const fs::NormEstimateSeries& s, std::vector<std::string>& errors) {
  json cells = json::array();
  for (const auto& e : s.estimates) {
    json c = {{"cell", e.cloud_id}, {"epsilon", e.epsilon}, {"escalations", e.escalations}};
    if (e.degenerate_image) c["warning"] = "degenerate image";
    if (!e.error.empty()) {
      c["error"] = e.error;
      errors.push_back(e.cloud_id + ": " + e.error);
    }
    cells.push_back(std::move(c));
  }
  return cells;
}

json hermite_report(int n_max) {
  json checks = json::array();
  auto add = [&](const std::string& name, bool pass, double worst, const std::string& note) {
    checks.push_back({{"name", name}, {"pass", pass}, {"worst", worst}, {"note", note}});
  };

  {
    bool ok = true;
    for (int n = 0; n <= n_max; ++n)
      ok = ok && hermite::hermite_monomial(n)[n] == numerics::pow(BigRational(2), n);
    add("leading_coefficient", ok, 0.0, "monomial leading coefficient of H_n is 2^n");
  }
  {
    const auto quad = numerics::gauss_hermite_nodes(n_max + 1);
    double worst = 0.0;
    for (int m = 0; m <= n_max; ++m)
      for (int n = 0; n <= n_max; ++n) {
        const double v = hermite::hermite_orthogonality(m, n, quad);
        const double nm = std::sqrt(std::numbers::pi) *
                          hermite::hermite_norm_sq_over_sqrt_pi(m).to_double();
        const double nn = std::sqrt(std::numbers::pi) *
                          hermite::hermite_norm_sq_over_sqrt_pi(n).to_double();
        worst = std::max(worst, m == n ? std::abs(v - nn) / nn : std::abs(v) / std::sqrt(nm * nn));
      }
    add("orthogonality", worst <= 1e-12, worst, "relative error vs sqrt(pi) 2^n n! delta");
  }
  const std::vector<BigRational> shifts{BigRational(1, 2), BigRational(1), BigRational(2)};
  {
    bool ok = true;
    for (int n = 0; n <= n_max; ++n)
      for (const auto& a : shifts) {
        const auto e = hermite::shifted_expansion(n, a);
        for (int k = 0; k < 20; ++k) {
          const BigRational x(k - 10, 3);
          ok = ok && e.evaluate(x) == hermite::hermite_eval(n, x + a);
        }
      }
    add("shifted_expansion", ok, 0.0, "exact pointwise identity at 20 rational x");
  }
  {
    double worst = 0.0;
    for (int n = 0; n <= n_max; ++n)
      for (const auto& a : shifts) {
        const double ex = hermite::shift_norm_ratio(n, a.to_double(), hermite::RatioMode::Exact);
        const double qu = hermite::shift_norm_ratio(n, a.to_double(), hermite::RatioMode::Quadrature);
        worst = std::max(worst, std::abs(ex - qu) / ex);
      }
    add("ratio_exact_vs_quadrature", worst <= 1e-8, worst, "relative difference");
  }
  {
    double worst = 0.0;
    for (int n = 1; n <= n_max; ++n)
      for (const auto& a : shifts) {
        const double r = hermite::shift_norm_ratio_exact(n, a).to_double();
        worst = std::max(worst, r / hermite::shift_ratio_bound(n, a.to_double()));
      }
    add("shift_ratio_bound", worst <= 1.0, worst, "max of R_n(a) / (n 8^n e^{a^2} C_a)");
  }
  {
    double worst = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      numerics::CounterRng rng(20260101, static_cast<std::uint64_t>(n));
      for (int sample = 0; sample < 100; ++sample) {
        std::vector<double> c(n + 1);
        for (auto& v : c) v = rng.normal();
        for (const auto& a : shifts) {
          const double r = hermite::polynomial_shift_ratio(c, a.to_double());
          worst = std::max(worst, r / hermite::shift_ratio_bound(n, a.to_double()));
        }
      }
    }
    add("polynomial_shift_bound", worst <= 1.0, worst, "100 random polynomials per degree");
  }
  bool all = true;
  for (const auto& c : checks) all = all && c["pass"].get<bool>();
  return {{"n_max", n_max}, {"checks", checks}, {"all_pass", all}};
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::AffineCertify: return "affine_certify";
    case ExperimentKind::DivergenceScan: return "divergence_scan";
    case ExperimentKind::RhoSeries: return "rho_series";
    case ExperimentKind::CompactProbe: return "compact_probe";
    case ExperimentKind::HermiteVerify: return "hermite_verify";
    case ExperimentKind::GSpan: return "g_span";
  }
  return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
  for (auto k : {ExperimentKind::AffineCertify, ExperimentKind::DivergenceScan,
                 ExperimentKind::RhoSeries, ExperimentKind::CompactProbe,
                 ExperimentKind::HermiteVerify, ExperimentKind::GSpan})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown experiment '" + std::string(name) + "'");
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw ValidationError("config: missing string field 'experiment'");
  ExperimentConfig c;
  c.experiment = parse_experiment(j["experiment"].get<std::string>());
  const auto errs = validate(descriptor_for(c.experiment).schema, j);
  if (!errs.empty()) {
    std::string msg = "config does not match the " + std::string(to_string(c.experiment)) + " schema:";
    for (const auto& e : errs) msg += " " + e + ";";
    throw ValidationError(msg);
  }
  c.raw = j;
  try {
    if (j.contains("kernel")) c.kernel = io::kernel_from_json(j["kernel"]);
    if (j.contains("map")) c.map = io::map_from_json(j["map"], c.kernel.dimension());
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  if (j.contains("clouds")) c.clouds = j["clouds"];
  c.params = j.value("params", json::object());
  if (j.contains("grid")) c.grid = io::grid_from_json(j["grid"]);
  if (j.contains("precision")) c.precision = numerics::parse_precision(j["precision"].get<std::string>());
  if (j.contains("jitter")) {
    const auto& jt = j["jitter"];
    if (jt.contains("initial")) c.jitter.initial = jt["initial"].get<double>();
    if (jt.contains("growth")) c.jitter.growth = jt["growth"].get<double>();
    if (jt.contains("ceiling_relative")) c.jitter.ceiling_relative = jt["ceiling_relative"].get<double>();
    if (!(c.jitter.growth > 1.0)) throw ValidationError("jitter.growth must exceed 1");
  }
  c.output = j.value("output", std::string());

  if ((c.experiment == ExperimentKind::AffineCertify || c.experiment == ExperimentKind::CompactProbe) &&
      !c.map->is_affine())
    throw ValidationError(std::string(to_string(c.experiment)) + " requires an affine map");
  if (c.experiment == ExperimentKind::RhoSeries &&
      c.params["z_im"].size() != static_cast<std::size_t>(c.kernel.dimension()))
    throw ValidationError("rho_series: z_im length must equal the kernel dimension");
  if (!c.clouds.is_null()) (void)c.build_clouds();  // surfaces design errors early
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

std::vector<rkhs::PointCloud> ExperimentConfig::build_clouds() const {
  const std::string design = clouds.at("design").get<std::string>();
  const int d = kernel.dimension();
  std::vector<rkhs::PointCloud> out;
  try {
    if (design == "random") {
      const auto box = io::box_from_json(clouds.at("box"));
      const std::size_t count = clouds.value("count", 1);
      const long lo = clouds.value("min_size", 2);
      const long hi = clouds.value("max_size", 8);
      if (lo > hi) throw ValidationError("clouds: min_size > max_size");
      const std::uint64_t seed = clouds.value("seed", 0ULL);
      for (std::size_t i = 0; i < count; ++i) {
        numerics::CounterRng rng(seed, i);
        const auto m = static_cast<std::size_t>(rng.uniform_int(lo, hi));
        out.push_back(fs::random_cloud(d, m, box, rng, "random-" + std::to_string(i)));
      }
    } else if (design == "nested_random") {
      const auto box = io::box_from_json(clouds.at("box"));
      std::vector<std::size_t> sizes;
      for (const auto& s : clouds.at("sizes")) sizes.push_back(s.get<std::size_t>());
      out = fs::nested_random(d, sizes, box, clouds.value("seed", 0ULL));
    } else if (design == "merging_pair") {
      const double delta = clouds.value("delta", 1e-3);
      for (const auto& x : clouds.at("x0")) {
        std::vector<double> base = x.is_array() ? numbers_of(x) : std::vector<double>{x.get<double>()};
        if (static_cast<int>(base.size()) != d) throw ValidationError("clouds.x0: wrong dimension");
        out.push_back(fs::merging_pair(base, delta, "pair-" + format_point(base)));
      }
    } else if (design == "equispaced") {
      if (d != 1) throw ValidationError("clouds: equispaced design is one-dimensional");
      for (const auto& s : clouds.at("sizes")) {
        const auto m = s.get<std::size_t>();
        out.push_back(fs::equispaced(clouds.at("lo").get<double>(), clouds.at("hi").get<double>(), m,
                                     "equispaced-" + std::to_string(m)));
      }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("clouds: ") + e.what());
  } catch (const Error& e) {
    throw ValidationError(std::string("clouds: ") + e.what());
  }
  return out;
}

std::string ExperimentConfig::hash() const { return "fnv1a64:" + fnv1a64_hex(raw.dump()); }

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  const auto precision = options.precision.value_or(config.precision);
  RunResult res;
  res.out_dir = options.out_dir ? *options.out_dir
                                : std::filesystem::path(config.output.empty()
                                                            ? "out/" + std::string(to_string(config.experiment))
                                                            : config.output);
  std::filesystem::create_directories(res.out_dir);
  Output out{res.out_dir, {}};
  const std::string kdesc = config.kernel.descriptor();
  const std::string mdesc = config.map ? config.map->descriptor() : "none";
  json cells = json::array();
  json summary;

  switch (config.experiment) {
    case ExperimentKind::AffineCertify:
    case ExperimentKind::DivergenceScan: {
      auto policy = config.jitter;
      policy.precision = precision;
      const auto clouds = config.build_clouds();
      const auto series = fs::divergence_scan(config.kernel, *config.map, clouds, policy, options.jobs);
      out.write("estimates.csv", series.to_csv());
      cells = estimate_cells(series, res.errors);
      double vmax = 0.0;
      for (const auto& e : series.estimates)
        if (std::isfinite(e.value)) vmax = std::max(vmax, e.value);
      summary = {{"estimates", series.estimates.size()}, {"max_estimate", vmax},
                 {"nested", series.nested}, {"monotone", series.monotone}};
      if (config.experiment == ExperimentKind::AffineCertify) {
        const auto mem = kernels::g_membership(config.kernel, config.map->linear(), config.grid);
        summary["member"] = mem.member;
        summary["lambda"] = mem.lambda_est;
        summary["reason"] = mem.reason;
        bool certified = mem.member;
        if (mem.member) {
          const double bound = 1.0 / std::sqrt(mem.lambda_est);
          summary["bound"] = bound;
          for (const auto& e : series.estimates)
            certified = certified && std::isfinite(e.value) && e.value <= bound + 1e-8;
          // with the Jacobian of the substitution the sharp cap is (lambda |det A|)^{-1/2}
          double det = 1.0;
          for (double sv : numerics::svd_small(config.map->linear())) det *= sv;
          const double jac_bound = bound / std::sqrt(det);
          bool within = true;
          for (const auto& e : series.estimates)
            within = within && std::isfinite(e.value) && e.value <= jac_bound + 1e-8;
          summary["jacobian_bound"] = jac_bound;
          summary["within_jacobian_bound"] = within;
        }
        summary["certified"] = certified;
      }
      break;
    }
    case ExperimentKind::RhoSeries: {
      const auto& p = config.params;
      const int n_max = p.at("n_max").get<int>();
      const auto im = numbers_of(p.at("z_im"));
      std::vector<double> re = p.contains("z_re") ? numbers_of(p["z_re"]) : std::vector<double>(im.size(), 0.0);
      if (re.size() != im.size()) throw ValidationError("rho_series: z_re and z_im lengths differ");
      std::vector<std::complex<double>> z;
      for (std::size_t i = 0; i < im.size(); ++i) z.emplace_back(re[i], im[i]);
      numerics::QuadratureScheme quad = hermite::default_rho_scheme(config.kernel);
      if (p.contains("nodes")) {
        const int nodes = p["nodes"].get<int>();
        if (config.kernel.family() == kernels::KernelFamily::Gaussian) quad = numerics::gauss_hermite_nodes(nodes);
        else if (config.kernel.family() == kernels::KernelFamily::Sinc) {
          const double b = *config.kernel.support_half_width();
          quad = numerics::gauss_legendre_nodes(nodes, -b, b);
        }
      }
      const auto series = hermite::growth_rate_series(config.kernel, kernels::StripPoint(z), n_max, quad);
      out.write("rho_series.csv", with_provenance(series.to_csv(), {}, kdesc, mdesc, 0.0,
                                                  numerics::Precision::Double));
      double worst = 0.0;
      bool monotone = true;
      for (std::size_t i = 0; i < series.entries.size(); ++i) {
        worst = std::max(worst, series.entries[i].nth_root);
        if (i > 0 && series.entries[i].rho < series.entries[i - 1].rho * (1.0 - 1e-12)) monotone = false;
      }
      summary = {{"n_max", n_max}, {"max_nth_root", worst}, {"monotone", monotone},
                 {"rho_n_max", series.entries.back().rho}};
      break;
    }
    case ExperimentKind::CompactProbe: {
      const auto seps = numbers_of(config.params.at("separations"));
      const auto vals = fs::compactness_probe(config.kernel, *config.map, seps);
      std::ostringstream csv;
      csv << "separation,squared_distance\n";
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < seps.size(); ++i) {
        csv << format_double(seps[i]) << ',' << format_double(vals[i]) << '\n';
        ids.push_back("pair-" + std::to_string(i));
      }
      out.write("probe.csv", with_provenance(csv.str(), ids, kdesc, mdesc, 0.0, numerics::Precision::Double));
      double floor = 2.0 * config.kernel.u0();
      for (std::size_t i = 0; i < seps.size(); ++i)
        if (seps[i] >= 3.0) floor = std::min(floor, vals[i]);
      summary = {{"values", vals}, {"min_value_separation_ge_3", floor}, {"two_u0", 2.0 * config.kernel.u0()}};
      break;
    }
    case ExperimentKind::HermiteVerify: {
      const int n_max = config.params.value("n_max", 12);
      summary = hermite_report(n_max);
      out.write("report.json", summary.dump(2) + "\n");
      break;
    }
    case ExperimentKind::GSpan: {
      std::vector<numerics::Matrix<double>> members;
      std::ostringstream csv;
      csv << "index,member,lambda,reason,analytic\n";
      std::vector<std::string> ids;
      std::size_t idx = 0;
      for (const auto& mj : config.params.at("matrices")) {
        numerics::Matrix<double> a;
        try {
          a = io::matrix_from_json(mj);
        } catch (const Error& e) {
          throw ValidationError(e.what());
        }
        if (static_cast<int>(a.rows()) != config.kernel.dimension() || a.rows() != a.cols())
          throw ValidationError("g_span: matrices must be d x d");
        const auto rep = kernels::g_membership(config.kernel, a, config.grid);
        csv << idx << ',' << (rep.member ? "true" : "false") << ',' << format_double(rep.lambda_est) << ','
            << rep.reason << ',' << (rep.analytic ? "true" : "false") << '\n';
        ids.push_back("matrix-" + std::to_string(idx));
        if (rep.member) members.push_back(a);
        ++idx;
      }
      out.write("membership.csv", with_provenance(csv.str(), ids, kdesc, mdesc, 0.0, numerics::Precision::Double));
      const auto span = members.empty() ? kernels::SpanReport{} : kernels::g_spans_check(members);
      summary = {{"members", members.size()}, {"rank", span.rank}, {"spans", span.spans}};
      break;
    }
  }

  out.write("summary.json", summary.dump(2) + "\n");
  json manifest = {{"tool", "compop"},
                   {"version", kToolVersion},
                   {"experiment", to_string(config.experiment)},
                   {"config_hash", config.hash()},
                   {"precision", numerics::to_string(precision)},
                   {"prng", {{"algorithm", numerics::CounterRng::algorithm}}},
                   {"files", out.files},
                   {"cells", cells},
                   {"errors", res.errors}};
  if (config.clouds.is_object() && config.clouds.contains("seed"))
    manifest["prng"]["seed"] = config.clouds["seed"];
  write_atomic(res.out_dir / "manifest.json", manifest.dump(2) + "\n");
  out.files.push_back("manifest.json");
  res.files = out.files;
  res.summary = summary;
  res.exit_code = res.errors.empty() ? 0 : 2;
  return res;
}

}  // namespace compop::cli
