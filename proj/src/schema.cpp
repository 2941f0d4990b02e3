#include "compop/schema.hpp"

#include <algorithm>

namespace compop::cli {

namespace {

const char* kKernel = R"({
  "type": "object",
  "required": ["family"],
  "properties": {
    "family": {"type": "string", "enum": ["gaussian", "sinc", "tabulated"]},
    "scale_or_bandwidth": {"type": "number", "minimum": 0},
    "dimension": {"type": "integer", "minimum": 1, "maximum": 8},
    "xi_min": {"type": "number"},
    "xi_step": {"type": "number", "minimum": 0},
    "values": {"type": "array", "items": {"type": "number"}, "minItems": 2},
    "declared_bound": {"type": "number"},
    "u0": {"type": "number"},
    "decay": {"type": "string", "enum": ["gaussian_decay", "compact_support", "unknown"]}
  },
  "additionalProperties": false
})";

const char* kBox = R"({
  "type": "object",
  "required": ["lo", "hi"],
  "properties": {
    "lo": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    "hi": {"type": "array", "items": {"type": "number"}, "minItems": 1}
  },
  "additionalProperties": false
})";

const char* kMap = R"({
  "type": "object",
  "required": ["kind"],
  "properties": {
    "kind": {"type": "string", "enum": ["affine", "identity", "quadratic", "scaled_exp", "composite"]},
    "A": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    "b": {"type": "array", "items": {"type": "number"}},
    "alpha": {"type": "number"},
    "beta": {"type": "number"},
    "c": {"type": "number"},
    "parts": {"type": "array", "items": {"type": "object"}, "minItems": 1},
    "domain": {"type": "object"}
  },
  "additionalProperties": false
})";

const char* kClouds = R"({
  "type": "object",
  "required": ["design"],
  "properties": {
    "design": {"type": "string", "enum": ["random", "nested_random", "merging_pair", "equispaced"]},
    "count": {"type": "integer", "minimum": 1, "maximum": 10000},
    "min_size": {"type": "integer", "minimum": 1},
    "max_size": {"type": "integer", "minimum": 1, "maximum": 64},
    "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 64}, "minItems": 1},
    "box": {"type": "object"},
    "seed": {"type": "integer", "minimum": 0},
    "x0": {"type": "array", "minItems": 1},
    "delta": {"type": "number", "minimum": 0},
    "lo": {"type": "number"},
    "hi": {"type": "number"}
  },
  "additionalProperties": false
})";

const char* kJitter = R"({
  "type": "object",
  "properties": {
    "initial": {"type": "number", "minimum": 0},
    "growth": {"type": "number", "minimum": 1},
    "ceiling_relative": {"type": "number", "minimum": 0}
  },
  "additionalProperties": false
})";

json base_schema(const std::string& name, const json& params, bool needs_kernel, bool needs_map,
                 bool needs_clouds) {
  json s = {{"type", "object"},
            {"properties",
             {{"experiment", {{"type", "string"}, {"enum", {name}}}},
              {"kernel", json::parse(kKernel)},
              {"precision", {{"type", "string"}, {"enum", {"double", "quad", "extended"}}}},
              {"output", {{"type", "string"}}},
              {"jitter", json::parse(kJitter)},
              {"grid",
               {{"type", "object"},
                {"properties",
                 {{"extent", {{"type", "number"}, {"minimum", 0}}},
                  {"points_per_axis", {{"type", "integer"}, {"minimum", 2}}}}},
                {"additionalProperties", false}}},
              {"params", params}}},
            {"additionalProperties", false}};
  json required = {"experiment"};
  if (needs_kernel) required.push_back("kernel");
  if (needs_map) {
    s["properties"]["map"] = json::parse(kMap);
    required.push_back("map");
  }
  if (needs_clouds) {
    s["properties"]["clouds"] = json::parse(kClouds);
    s["properties"]["clouds"]["properties"]["box"] = json::parse(kBox);
    required.push_back("clouds");
  }
  s["required"] = required;
  return s;
}

std::vector<ExperimentDescriptor> build_catalog() {
  std::vector<ExperimentDescriptor> c;
  const json empty_params = {{"type", "object"}, {"properties", json::object()}};

  c.push_back({"affine_certify",
               "finite-section norm estimates for an affine map against the lambda^{-1/2} bound",
               base_schema("affine_certify", empty_params, true, true, true),
               json::parse(R"({"experiment": "affine_certify",
                 "kernel": {"family": "gaussian", "scale_or_bandwidth": 1.0, "dimension": 1},
                 "map": {"kind": "affine", "A": [[0.5]], "b": [1.0]},
                 "clouds": {"design": "random", "count": 20, "min_size": 2, "max_size": 8,
                            "box": {"lo": [-3.0], "hi": [3.0]}, "seed": 7}})")});

  c.push_back({"divergence_scan", "norm estimates over a cloud family for any map",
               base_schema("divergence_scan", empty_params, true, true, true),
               json::parse(R"({"experiment": "divergence_scan",
                 "kernel": {"family": "gaussian", "scale_or_bandwidth": 1.0, "dimension": 1},
                 "map": {"kind": "quadratic"},
                 "clouds": {"design": "merging_pair", "x0": [1.0, 5.0, 10.0, 25.0], "delta": 0.001}})")});

  c.push_back({"rho_series", "growth rates rho_n of the multiplier on polynomial spaces",
               base_schema("rho_series",
                           json::parse(R"({"type": "object", "required": ["n_max", "z_im"],
                             "properties": {
                               "n_max": {"type": "integer", "minimum": 1, "maximum": 60},
                               "z_im": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                               "z_re": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                               "nodes": {"type": "integer", "minimum": 2, "maximum": 200}},
                             "additionalProperties": false})"),
                           true, false, false),
               json::parse(R"({"experiment": "rho_series",
                 "kernel": {"family": "gaussian", "scale_or_bandwidth": 1.0, "dimension": 1},
                 "params": {"n_max": 30, "z_im": [1.0]}})")});

  c.push_back({"compact_probe", "squared image feature distances of separated pairs",
               base_schema("compact_probe",
                           json::parse(R"({"type": "object", "required": ["separations"],
                             "properties": {
                               "separations": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1}},
                             "additionalProperties": false})"),
                           true, true, false),
               json::parse(R"({"experiment": "compact_probe",
                 "kernel": {"family": "gaussian", "scale_or_bandwidth": 1.0, "dimension": 1},
                 "map": {"kind": "identity"},
                 "params": {"separations": [0.0, 1.0, 3.0, 5.0, 10.0]}})")});

  c.push_back({"hermite_verify", "Hermite identities, orthogonality and shift-ratio bounds",
               base_schema("hermite_verify",
                           json::parse(R"({"type": "object", "required": ["n_max"],
                             "properties": {"n_max": {"type": "integer", "minimum": 1, "maximum": 30}},
                             "additionalProperties": false})"),
                           false, false, false),
               json::parse(R"({"experiment": "hermite_verify", "params": {"n_max": 12}})")});

  c.push_back({"g_span", "G(u) membership of a matrix set and the rank of its span",
               base_schema("g_span",
                           json::parse(R"({"type": "object", "required": ["matrices"],
                             "properties": {"matrices": {"type": "array", "minItems": 1,
                               "items": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}}},
                             "additionalProperties": false})"),
                           true, false, false),
               json::parse(R"({"experiment": "g_span",
                 "kernel": {"family": "gaussian", "scale_or_bandwidth": 1.0, "dimension": 2},
                 "params": {"matrices": [[[1, 0], [0, 1]], [[1, 0], [0, 0.5]], [[0.5, 0], [0, 1]]]}})")});
  return c;
}

bool type_matches(const std::string& t, const json& v) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "null") return v.is_null();
  return false;
}

void check(const json& schema, const json& v, const std::string& path, std::vector<std::string>& errs) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) ok = type_matches(t.get<std::string>(), v);
    else for (const auto& x : t) ok = ok || type_matches(x.get<std::string>(), v);
    if (!ok) {
      errs.push_back(path + ": expected type " + t.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    const auto& e = schema["enum"];
    if (std::find(e.begin(), e.end(), v) == e.end())
      errs.push_back(path + ": value " + v.dump() + " not in " + e.dump());
  }
  if (v.is_number()) {
    if (schema.contains("minimum") && v.get<double>() < schema["minimum"].get<double>())
      errs.push_back(path + ": below minimum " + schema["minimum"].dump());
    if (schema.contains("maximum") && v.get<double>() > schema["maximum"].get<double>())
      errs.push_back(path + ": above maximum " + schema["maximum"].dump());
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
      errs.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
    if (schema.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        check(schema["items"], v[i], path + "[" + std::to_string(i) + "]", errs);
  }
  if (v.is_object()) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"])
        if (!v.contains(r.get<std::string>()))
          errs.push_back(path + ": missing required field '" + r.get<std::string>() + "'");
    const json props = schema.value("properties", json::object());
    for (const auto& [key, val] : v.items()) {
      if (props.contains(key)) {
        check(props[key], val, path + "." + key, errs);
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false) {
        errs.push_back(path + ": unexpected field '" + key + "'");
      }
    }
  }
}

}  // namespace

const std::vector<ExperimentDescriptor>& list_experiments() {
  static const std::vector<ExperimentDescriptor> catalog = build_catalog();
  return catalog;
}

json catalog_json() {
  json out = json::array();
  for (const auto& d : list_experiments())
    out.push_back({{"name", d.name}, {"summary", d.summary}, {"schema", d.schema}, {"example", d.example}});
  return out;
}

std::vector<std::string> validate(const json& schema, const json& value) {
  std::vector<std::string> errs;
  check(schema, value, "$", errs);
  return errs;
}

}  // namespace compop::cli
