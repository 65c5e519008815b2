#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twhe/cover.hpp"
#include "twhe/fields.hpp"
#include "twhe/validation.hpp"

namespace twhe {

// Twisting data (B, beta, alpha) on a chart cover:
//   B_i - B_j = d beta_ij          on U_ij
//   beta_ij + beta_jk + beta_ki = -alpha_ijk^{-1} d alpha_ijk   on U_ijk
// B_i are (1,1)-forms in the stored-coefficient convention, beta_ij are
// (1,0)-forms, alpha_ijk are U(1)-valued. Absent entries mean B = 0,
// beta = 0, alpha = 1. Only i < j (resp. i < j < k) is stored; other orders
// follow from antisymmetry.
struct TwistData {
  CoverPtr cover;
  std::vector<std::optional<Form11Field>> B;
  std::map<std::pair<int, int>, Form10Field> beta;
  std::map<std::array<int, 3>, ComplexField> alpha;
  std::string id = "trivial";

  int num_charts() const { return cover->num_charts(); }
  cd alpha_at(int i, int j, int k, std::size_t idx) const;
  cd beta_at(int i, int j, int a, std::size_t idx) const;
  cd B_at(int i, std::size_t idx, int a, int b) const;
  bool has_beta() const { return !beta.empty(); }
  bool has_B() const;

  // Structural identity used when bundles are combined.
  bool same_as(const TwistData& other) const;
};

using TwistPtr = std::shared_ptr<const TwistData>;

// A complex 2-form split by type. The (2,0) and (0,2) parts are single
// coefficients (n = 2 only, dz1^dz2 and dzbar1^dzbar2).
struct TwoFormField {
  Form11Field f11;
  std::vector<cd> f20;
  std::vector<cd> f02;
};

TwistPtr build_trivial_twist(CoverPtr cover);

// Same B on every chart, beta = 0, alpha = 1. Rejects forms with a
// (2,0) or (0,2) part.
TwistPtr build_global_B(CoverPtr cover, const TwoFormField& B);

// B = -sqrt(-1) c omega for the torus metric omega, so sqrt(-1) Lambda B = c n.
TwistPtr build_constant_B(CoverPtr cover, double c, const class TorusGeometry& geom);

// Clock and shift matrices: C = diag(zeta^k), S e_k = e_{k+1}, zeta = e^{2 pi i / r}.
CMat clock_matrix(int r);
CMat shift_matrix(int r);

// Twist of the clock/shift projective bundle of rank r on a cover banded in
// x1 and y1. alpha takes values in the r-th roots of unity; r = 1 gives the
// trivial twist.
TwistPtr build_clock_shift_twist(CoverPtr cover, int r);

// Validates the twisting relations:
//   "dbeta"    (a) B_i - B_j - d beta_ij
//   "beta_sum" (b) beta_ij + beta_jk + beta_ki + alpha^{-1} d alpha
//   "cocycle"  (c) (delta alpha) - 1 on quadruple overlaps
//   "unitary"  (d) |alpha| - 1
// (b) and (c) use the phase alpha/|alpha| so that a modulus fault is only
// reported by (d).
ValidationReport validate_twist(const TwistData& t);

// Exhaustive search for a locally constant mu_r-valued 1-cochain c with
// alpha = delta c. Returns true if one exists. Components of overlaps are
// labelled by their seams; the search is capped at `max_assignments`.
bool is_mu_r_coboundary(const TwistData& t, int r, std::size_t max_assignments = 1u << 22);

// Helper shared with bundle builders: the transition between charts of a
// cover, built from per-axis wrap matrices (identity across mid seams),
// composed axis by axis in the order of banded_axes.
CMat constant_transition(const ChartCover& cover, const std::vector<CMat>& wrap, int from, int to,
                         std::size_t idx);

}  // namespace twhe
