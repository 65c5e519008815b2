#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twhe/solver.hpp"

namespace twhe {

// Smooth K-orthogonal projector onto a declared subbundle, in
// chart-of-record gauge.
struct SubbundleCandidate {
  EndoField projector;
  std::string label;
  int declared_rank = 0;
};

struct CandidateDefects {
  double idempotent = 0;         // sup |pi^2 - pi|
  double selfadjoint = 0;        // sup |pi - pi^{*K}|
  double rank = 0;               // sup |tr pi - declared rank|
  double weak_holomorphic = 0;   // sup |(Id - pi) dbar pi|
};
CandidateDefects candidate_defects(const SubbundleCandidate& c, const MetricField& K, const TwistedBundle& E);

// K-orthogonal projector onto the span of the given columns (r x k, in
// chart-of-record gauge at each point).
SubbundleCandidate candidate_from_inclusion(const MetricField& K, const std::function<CMat(std::size_t)>& columns,
                                            std::string label);
// Projector onto the summand `block` of a direct sum.
SubbundleCandidate factor_candidate(const MetricField& K, const TwistedBundle& E, int block);

enum class Verdict { kStable, kSemistable, kDestabilized };
const char* to_string(Verdict v);

struct CandidateSlope {
  std::string label;
  int rank = 0;
  double degree = 0;
  double slope = 0;
  double margin = 0;  // mu(E) - mu(candidate)
};

struct StabilityVerdict {
  double bundle_slope = 0;
  std::vector<CandidateSlope> candidates;  // rank 0 and full-rank candidates are excluded
  Verdict verdict = Verdict::kStable;
};

// Throws DomainError naming the candidate when its projector defects
// exceed `projector_tol`.
StabilityVerdict verdict_against(const std::vector<SubbundleCandidate>& candidates, const MetricField& K,
                                 const TwistedBundle& E, const TorusGeometry& geom, double tol,
                                 double projector_tol = 1e-8);

struct ProbeOptions {
  double gap_fraction = 0.2;  // cluster split threshold relative to the eigenvalue range
  double min_l2_norm = 1.0;   // |s|_{L2} below this is not a blow-up
  double tol = 1e-6;          // nu < -tol flags a destabilizing structure
};

struct ProbeLevel {
  double value = 0;   // mean eigenvalue of the cluster
  double stddev = 0;
  double min = 0;
  double max = 0;
  int multiplicity = 0;
};

struct ProbeProjector {
  EndoField projector;  // pi_j = P_j(u)
  int rank = 0;
  double degree = 0;
  double margin = 0;  // mu(E) - mu(E_j)
  double weak_holomorphic = 0;
  double projector_defect = 0;
  std::optional<double> principal_angle;  // against a reference projector
};

struct ProbeReport {
  bool conclusive = false;
  std::string reason;
  double l2_norm = 0;
  std::vector<ProbeLevel> levels;  // ascending
  std::vector<ProbeProjector> projectors;  // j = 1 .. l-1
  double bundle_degree = 0;
  double nu_weighted = 0;  // lambda_l deg E - sum (lambda_{j+1} - lambda_j) deg E_j
  double nu_margins = 0;   // sum (lambda_{j+1} - lambda_j) rank E_j (mu E - mu E_j)
  bool destabilizing = false;
  // Largest cluster spread relative to the smallest gap between clusters.
  double constancy_ratio = 0;
};

// Probe on a blow-up endpoint s = log h. `reference`, if given, is compared
// with pi_1 by the sup over the grid of the principal angle.
ProbeReport uy_probe(const EndoField& s, const MetricField& K, const TwistedBundle& E, const TorusGeometry& geom,
                     const ProbeOptions& opt = {}, const EndoField* reference = nullptr);

// sup over the grid of the largest principal angle between the ranges of two
// K-orthogonal projectors.
double principal_angle(const EndoField& P, const EndoField& Q, const MetricField& K);

}  // namespace twhe
