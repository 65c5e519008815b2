#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "twhe/solver.hpp"

namespace twhe {

// CSV file whose first line is "#schema=<tag>" followed by a header row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string fmt(double v);

inline constexpr const char* kTraceSchema = "twhe.trace.v1";
inline constexpr const char* kSummarySchema = "twhe.summary.v1";
inline constexpr const char* kProbeSchema = "twhe.probe.v1";
inline constexpr const char* kVerdictSchema = "twhe.verdict.v1";

// Columns: iter, epsilon, residual, max_log_h, det_drift, step_size, krylov_iters.
void write_trace_csv(const std::string& path, const SolverTrace& t);
// One row per epsilon.
void write_summary_csv(const std::string& path, const std::vector<SolverTrace>& traces);
// File name used for a trace, e.g. trace_eps_0.03.csv.
std::string trace_file_name(double eps);

}  // namespace twhe
