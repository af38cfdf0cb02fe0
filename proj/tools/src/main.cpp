#include "commands.hpp"
#include "config.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

enum Exit { kOk = 0, kInvariantFailed = 1, kConfigError = 2, kRuntimeError = 3 };

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ulab");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ULAB_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(env));
}

int emit_error(const std::string& check, const std::string& detail) {
  nlohmann::json j = {{"passed", false}, {"failures", {{{"check", check}, {"detail", detail}}}}};
  std::cout << j.dump(2) << '\n';
  return check == "config" ? kConfigError : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Numerical laboratory for invariant matrix ensembles"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::vector<int> n_override;
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  auto* n_opt = app.add_option("--n", n_override, "comma-separated size list (overrides n_list)")->delimiter(',');

  for (const auto& name : ulab::cli::subcommands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  ulab::cli::RunConfig cfg;
  try {
    cfg = ulab::cli::load_config(config_path);
    cfg.command = app.get_subcommands().front()->get_name();
    if (*out_opt) cfg.output = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (*n_opt) cfg.n_list = n_override;
    ulab::cli::validate(cfg);
  } catch (const ulab::cli::ConfigError& e) {
    return emit_error("config", e.what());
  }

  try {
    auto result = ulab::cli::run(cfg);
    result.files.commit(cfg.output);
    nlohmann::json summary = {{"command", cfg.command},
                              {"config_hash", result.report["config_hash"]},
                              {"passed", result.passed()},
                              {"failures", result.report["failures"]}};
    if (result.report.contains("suggested_rescale")) summary["suggested_rescale"] = result.report["suggested_rescale"];
    std::cout << summary.dump(2) << '\n';
    return result.passed() ? kOk : kInvariantFailed;
  } catch (const ulab::cli::ConfigError& e) {
    return emit_error("config", e.what());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return emit_error("runtime", e.what());
  }
}
