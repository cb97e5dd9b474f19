#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "invp/dimension_lab.hpp"

namespace invp::runner {

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string anchor;  // statement the experiment exercises
  bool sampling = false;
  std::vector<std::string> params;  // accepted keys under $.params
};

// Registry in listing order.
const std::vector<ExperimentInfo>& registry();

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 a required (or, with strict, any) verdict failed
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<Verdict> verdicts;
  std::vector<std::string> files;  // relative to the output directory
};

// Schema check without running: experiment name, seed requirement, param
// keys and the model itself. Throws ConfigInvalid.
void check_config(const ExperimentConfig& cfg);

// Runs the configured experiment and writes summary.txt, verdicts.csv, the
// experiment's CSV and plot files, and run_record.json into `out`.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out, bool strict);

}  // namespace invp::runner
