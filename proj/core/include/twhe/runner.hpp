#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twhe/config.hpp"

namespace twhe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPlateau = 2;

struct RunOptions {
  std::string out_dir;  // overrides output.directory when non-empty
  int jobs = 1;         // > 1 solves the schedule cold-started in parallel
  std::ostream* log = nullptr;
};

struct RunResult {
  int exit_code = kExitFailure;
  std::string report;
  std::vector<std::string> failures;
  bool plateau = false;
  std::vector<SolverTrace> traces;
  std::optional<ProbeReport> probe;
  std::optional<StabilityVerdict> verdict;
};

// Fixed pipeline: validate, normalize, chern, sweep, diagnostics, probe,
// report. Writes report.txt, trace_eps_<eps>.csv and summary.csv.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});
// Loads the config; configuration errors give exit code 1 with the message
// in the report.
RunResult run_config_file(const std::string& path, const RunOptions& opt = {});

}  // namespace twhe
