#pragma once

#include <string>
#include <vector>

#include "twhe/solver.hpp"
#include "twhe/stability.hpp"

namespace twhe {

struct GeometryConfig {
  int dim = 1;
  int resolution = 0;  // 0: default for the dimension
  std::vector<double> lattice;  // periods per real axis; empty = unit square
  std::string metric = "flat";
  int fd_order = 4;
};

struct BackgroundConfig {
  std::string seed = "reference";
  bool normalize = true;
};

struct SolverConfig {
  std::vector<double> schedule{0.1};
  SolverOptions options;
};

struct AnalysesConfig {
  bool validate = true;
  bool chern = true;
  bool bogomolov = false;
  bool lemma31 = true;
  bool lemma32 = true;
  bool sweep = true;
  bool probe = false;
  std::vector<std::string> candidates;  // "summand:<k>" or "container:<path>"
  double plateau_threshold = 0.1;  // final Phi-residual above this counts as a plateau
  double verdict_tol = 1e-2;
  ProbeOptions probe_options;
};

struct OutputConfig {
  std::string directory = "twhe_out";
  bool csv = true;
};

struct ExperimentConfig {
  std::string name;
  GeometryConfig geometry;
  std::string twist = "trivial";
  std::string bundle = "trivial:1";
  BackgroundConfig background;
  SolverConfig solver;
  AnalysesConfig analyses;
  OutputConfig output;
};

// Parses and validates a YAML experiment file. Errors are ConfigError with
// "<path>:<line>:<column> <field>" as the location.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");

}  // namespace twhe
