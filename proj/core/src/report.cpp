#include "twhe/report.hpp"

#include <cstdio>

#include "twhe/errors.hpp"

namespace twhe {

CsvWriter::CsvWriter(const std::string& path, const std::string& schema, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw ConfigError("cannot write", path);
  out_ << "#schema=" << schema << "\n";
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ShapeError("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
  out_.flush();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string trace_file_name(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "trace_eps_%g.csv", eps);
  return buf;
}

void write_trace_csv(const std::string& path, const SolverTrace& t) {
  CsvWriter w(path, kTraceSchema,
              {"iter", "epsilon", "residual", "max_log_h", "det_drift", "step_size", "krylov_iters"});
  for (const auto& h : t.history)
    w.row({std::to_string(h.iter), fmt(t.epsilon), fmt(h.residual), fmt(h.max_log_h), fmt(h.det_drift),
           fmt(h.step_size), std::to_string(h.krylov_iters)});
}

void write_summary_csv(const std::string& path, const std::vector<SolverTrace>& traces) {
  CsvWriter w(path, kSummarySchema,
              {"epsilon", "status", "iterations", "residual", "phi_residual", "eps_max_log_h", "max_log_h",
               "det_drift", "skew_defect", "lemma31_bound_slack", "lemma31_pointwise_defect",
               "lemma32_identity_defect"});
  for (const auto& t : traces)
    w.row({fmt(t.epsilon), t.error.empty() ? to_string(t.status) : "error",
           std::to_string(t.history.empty() ? 0 : t.history.size() - 1), fmt(t.residual), fmt(t.phi_residual),
           fmt(t.epsilon * t.max_log_h), fmt(t.max_log_h), fmt(t.det_drift), fmt(t.skew_defect),
           fmt(t.lemma31_bound_slack), fmt(t.lemma31_pointwise_defect), fmt(t.lemma32_identity_defect)});
}

}  // namespace twhe
