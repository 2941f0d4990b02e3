#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "compop/finite_section.hpp"
#include "compop/kernel_spectra.hpp"
#include "compop/numerics/precision.hpp"

namespace compop::cli {

using json = nlohmann::json;

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ExperimentKind { AffineCertify, DivergenceScan, RhoSeries, CompactProbe, HermiteVerify, GSpan };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::HermiteVerify;
  kernels::KernelSpec kernel = kernels::KernelSpec::gaussian();
  std::optional<fs::MapSpec> map;
  json clouds;  // cloud family descriptor, validated
  json params;
  kernels::GridPolicy grid;
  fs::JitterPolicy jitter;
  numerics::Precision precision = numerics::Precision::Double;
  std::string output;
  json raw;  // the config as loaded, for hashing

  /// Validates against the experiment's schema, then builds the typed fields.
  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Deterministic cloud family; fixed seed gives identical clouds.
  std::vector<rkhs::PointCloud> build_clouds() const;
  /// "fnv1a64:" + FNV-1a-64 of the canonical (key-sorted, compact) JSON.
  std::string hash() const;
};

std::string fnv1a64_hex(std::string_view bytes);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<numerics::Precision> precision;
  int jobs = 1;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 some cell failed numerically
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  std::vector<std::string> errors;
  json summary;
};

RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace compop::cli
