// compop: batch driver for the kernel / composition-operator experiments.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "compop/error.hpp"
#include "compop/experiment.hpp"
#include "compop/schema.hpp"
#include "criteria.hpp"

namespace {

using json = nlohmann::json;

int emit_error(const char* kind, const std::string& message, int code) {
  std::cout << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compop: RKHS composition-operator experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path, out_dir, precision;
  int jobs = 1;
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config's output)");
  run->add_option("--precision", precision, "pencil precision")
      ->check(CLI::IsMember({"double", "quad", "extended"}));
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-experiments", "print the experiment catalog with schemas");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  if (*list) {
    std::cout << compop::cli::catalog_json().dump(2) << std::endl;
    return 0;
  }
  if (*verify) {
    const auto results = compop::acceptance::run_all();
    bool ok = true;
    for (const auto& r : results) {
      std::cout << compop::acceptance::format_line(r) << std::endl;
      ok = ok && r.pass;
    }
    return ok ? 0 : 3;
  }

  try {
    const auto config = compop::cli::ExperimentConfig::load(config_path);
    compop::cli::RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    if (!precision.empty()) opts.precision = compop::numerics::parse_precision(precision);
    opts.jobs = jobs;
    const auto res = compop::cli::run(config, opts);
    json line = {{"status", res.exit_code == 0 ? "ok" : "numeric_failure"},
                 {"out_dir", res.out_dir.string()},
                 {"files", res.files},
                 {"errors", res.errors}};
    std::cout << line.dump() << std::endl;
    return res.exit_code;
  } catch (const compop::ValidationError& e) {
    return emit_error("validation", e.what(), 1);
  } catch (const compop::DomainError& e) {
    return emit_error("validation", e.what(), 1);
  } catch (const compop::Error& e) {
    return emit_error("numeric", e.what(), 2);
  } catch (const std::exception& e) {
    return emit_error("numeric", e.what(), 2);
  }
}
