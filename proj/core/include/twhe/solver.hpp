#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twhe/connection.hpp"
#include "twhe/geometry.hpp"
#include "twhe/linear.hpp"
#include "twhe/metric.hpp"

namespace twhe {

// Returns e^{phi} K with sqrt(-1) Lambda dbar d phi = -(1/r) tr Phi(K), so
// that tr Phi of the result vanishes. `mean_defect`, if given, receives
// |integral tr Phi(K) vol| / Vol measured before the solve.
MetricField normalize_background(const MetricField& K, const TwistedBundle& E, const TorusGeometry& geom,
                                 double* mean_defect = nullptr);

// lambda = 2 pi deg(E) / (r Vol) with deg measured from K.
double hermite_einstein_constant(const MetricField& K, const TwistedBundle& E, const TorusGeometry& geom);

struct SolverOptions {
  double epsilon = 0.1;
  double step_size = 1.0;
  int max_iters = 60;
  double residual_tol = 1e-10;
  double min_step = 1e-6;
  double step_growth = 1.2;
  int growth_after = 5;
  KrylovOptions krylov;
  void validate() const;
};

enum class SolveStatus { kConverged, kStalled, kIterationLimit };
const char* to_string(SolveStatus s);

struct IterationRecord {
  int iter = 0;
  double residual = 0;
  double max_log_h = 0;
  double det_drift = 0;
  double step_size = 0;
  int krylov_iters = 0;
};

struct SolverTrace {
  double epsilon = 0;
  SolveStatus status = SolveStatus::kIterationLimit;
  std::vector<IterationRecord> history;
  EndoField s;              // log h in chart-of-record gauge
  double residual = 0;      // sup |L_eps(h)|_H, H-self-adjoint part
  double skew_defect = 0;   // sup of the H-skew part of L, a discretization defect
  double phi_residual = 0;  // sup |sqrt(-1) Lambda F_H - lambda Id|_H
  double max_log_h = 0;     // sup |s|_K
  double det_drift = 0;     // sup |det h - 1|
  double lemma31_bound_slack = 0;
  double lemma31_pointwise_defect = 0;
  double lemma32_identity_defect = 0;
  std::string error;  // set when a sweep entry failed
};

// Data of the perturbed equation around a fixed background K, shared by all
// epsilon. The unknown is s = log h, K-self-adjoint; H = K e^s.
class PerturbedProblem {
 public:
  PerturbedProblem(MetricField K, const TwistedBundle& E, const TorusGeometry& geom);

  const MetricField& background() const { return K_; }
  const TwistedBundle& bundle() const { return ctx_.bundle(); }
  const TorusGeometry& geometry() const { return geom_; }
  const GaugeContext& gauge() const { return ctx_; }
  const EndForm10& connection() const { return AK_; }
  double lambda() const { return lambda_; }
  // Phi(K) = sqrt(-1) Lambda F_K - lambda Id.
  const EndoField& phi_background() const { return phiK_; }

  // Phi(H) for H = K e^s.
  EndoField phi(const EndoField& s) const;
  // L = Phi(H) + eps s.
  EndoField residual(const EndoField& s, double eps) const;
  // sup over points of |L|_H with H = K e^s; `skew` receives the sup of
  // the H-skew part.
  double sup_norm_h(const EndoField& L, const EndoField& s, double* skew = nullptr) const;

  // Real coordinates of a K-self-adjoint field: the entries of the Hermitian
  // matrix L^dagger s L^{-dagger}, L the Cholesky factor of K.
  Eigen::VectorXd to_coords(const EndoField& s) const;
  EndoField from_coords(const Eigen::VectorXd& v) const;
  int coords_per_point() const { return rank() * rank(); }
  int rank() const { return K_.rank(); }

 private:
  MetricField K_;
  TorusGeometry geom_;
  GaugeContext ctx_;
  EndForm10 AK_;
  EndoField phiK_;
  std::vector<CMat> chol_;  // L^dagger per point
  double lambda_ = 0;
};

// Damped Newton-Krylov iteration on s; throws IterationLimitError if the
// tolerance is not met (the trace is recorded in the message) unless
// `trace_on_failure` is set, in which case the trace is returned with a
// non-converged status.
SolverTrace solve_perturbed(const PerturbedProblem& P, const SolverOptions& opt,
                            const EndoField* warm_start = nullptr, bool trace_on_failure = false);

// Runs the schedule (strictly decreasing, in (0, 1]) with warm starts; a
// failing entry is recorded and the next one starts cold.
std::vector<SolverTrace> epsilon_sweep(const PerturbedProblem& P, const std::vector<double>& schedule,
                                       const SolverOptions& opt);

struct Lemma31Report {
  double pointwise_defect = 0;  // sup of (lhs - rhs)_+ of the differential inequality
  double bound2_slack = 0;      // (1/eps) max|Phi(K)| - max|s|
  double bound3_ratio = 0;      // max|s| / (|s|_{L2} + max|Phi(K)|)
  double bound3_slack(double C) const { return C - bound3_ratio; }
};
Lemma31Report check_lemma31(const PerturbedProblem& P, const EndoField& s, double eps);

struct Lemma32Report {
  double lhs = 0;
  double rhs = 0;
  double defect = 0;
  double budget = 0;
  double psi_term = 0;            // integral <Psi(s)(dbar s), dbar s>_K
  double pointwise_defect = 0;    // sup over the sample of the two pointwise expressions
  bool pass() const { return defect <= budget; }
};
Lemma32Report check_lemma32(const PerturbedProblem& P, const EndoField& s, double eps, double residual_tol,
                            int sample_points = 100);

// Fills the derived fields of a trace (residuals, max|log h|, det drift,
// lemma diagnostics) from trace.s.
void finalize_trace(const PerturbedProblem& P, SolverTrace& trace, double residual_tol);

}  // namespace twhe
