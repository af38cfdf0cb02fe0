#pragma once

#include "config.hpp"
#include "output.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ulab::cli {

struct Failure {
  std::string check;
  std::string detail;
};

struct CommandResult {
  nlohmann::json report;          // also written as <command>.json
  std::vector<Failure> failures;  // asserted invariants that did not hold
  OutputSet files;

  bool passed() const { return failures.empty(); }
};

const std::vector<std::string>& subcommands();

// Runs config.command. Throws ConfigError for an unknown command.
CommandResult run(const RunConfig& config);

// Sign and indexing conventions used throughout, embedded in every report.
nlohmann::json conventions();

}  // namespace ulab::cli
