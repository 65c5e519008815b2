#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "twhe/chern.hpp"
#include "twhe/errors.hpp"
#include "twhe/stability.hpp"

namespace twhe {
namespace {

struct SplitCase {
  testing::ThetaSetup T;
  TwistedBundle E;
  MetricField K;
  SplitCase(int d1, int d2) : E(T.split(d1, d2)), K(normalize_background(testing::bumped_metric(E, false), E, T.geom)) {}
};

// The theta(1) + theta(-1) sweep endpoint, shared by the probe tests.
const SplitCase& unstable() {
  static const SplitCase c(1, -1);
  return c;
}

const SolverTrace& unstable_endpoint() {
  static const SolverTrace t = [] {
    const SplitCase& c = unstable();
    const PerturbedProblem P(c.K, c.E, c.T.geom);
    SolverOptions o;
    o.residual_tol = 1e-9;
    return epsilon_sweep(P, {0.3, 0.1, 0.03, 0.01}, o).back();
  }();
  return t;
}

TEST(Candidates, FactorProjectorIsValid) {
  const SplitCase c(1, -1);
  for (int b : {0, 1}) {
    const SubbundleCandidate cand = factor_candidate(c.K, c.E, b);
    EXPECT_EQ(cand.declared_rank, 1);
    const CandidateDefects d = candidate_defects(cand, c.K, c.E);
    EXPECT_LT(d.idempotent, 1e-12);
    EXPECT_LT(d.selfadjoint, 1e-12);
    EXPECT_LT(d.rank, 1e-12);
    EXPECT_LT(d.weak_holomorphic, 1e-12);
  }
}

TEST(Candidates, TraceIntegratesToRankTimesVolume) {
  const SplitCase c(1, 1);
  const TorusGeometry& geom = c.T.geom;
  const SubbundleCandidate cand = factor_candidate(c.K, c.E, 0);
  RealField tr(c.T.grid);
  for (std::size_t i = 0; i < c.T.grid->size(); ++i) tr[i] = cand.projector.get(i).trace().real();
  EXPECT_NEAR(integrate(tr, geom), 1.0 * geom.volume(), differential_tol(c.T.grid->h()));
}

TEST(Candidates, InclusionOfSecondColumnMatchesFactor) {
  const SplitCase c(1, -1);
  const SubbundleCandidate inc = candidate_from_inclusion(
      c.K, [](std::size_t) { return CMat(CMat::Identity(2, 2).col(1)); }, "e2");
  const SubbundleCandidate fac = factor_candidate(c.K, c.E, 1);
  EXPECT_LT(principal_angle(inc.projector, fac.projector, c.K), 1e-10);
}

TEST(Verdict, EqualFactorsAreSemistable) {
  const SplitCase c(1, 1);
  const double tol = differential_tol(c.T.grid->h());
  const StabilityVerdict v = verdict_against({factor_candidate(c.K, c.E, 0)}, c.K, c.E, c.T.geom, tol);
  ASSERT_EQ(v.candidates.size(), 1u);
  EXPECT_NEAR(v.candidates[0].margin, 0.0, tol);
  EXPECT_EQ(v.verdict, Verdict::kSemistable);
  EXPECT_STREQ(to_string(v.verdict), "semistable-against-list");
}

TEST(Verdict, PositiveFactorDestabilizes) {
  const SplitCase c(1, -1);
  const double tol = differential_tol(c.T.grid->h());
  const StabilityVerdict v = verdict_against({factor_candidate(c.K, c.E, 0)}, c.K, c.E, c.T.geom, tol);
  EXPECT_NEAR(v.bundle_slope, 0.0, tol);
  EXPECT_NEAR(v.candidates[0].slope, 1.0, tol);
  EXPECT_EQ(v.verdict, Verdict::kDestabilized);
}

TEST(Verdict, NegativeFactorAloneIsStable) {
  const SplitCase c(1, -1);
  const double tol = differential_tol(c.T.grid->h());
  const StabilityVerdict v = verdict_against({factor_candidate(c.K, c.E, 1)}, c.K, c.E, c.T.geom, tol);
  EXPECT_NEAR(v.candidates[0].margin, 1.0, tol);
  EXPECT_EQ(v.verdict, Verdict::kStable);
}

TEST(Verdict, EmptyListIsVacuouslyStable) {
  const SplitCase c(1, -1);
  const StabilityVerdict v = verdict_against({}, c.K, c.E, c.T.geom, 1e-3);
  EXPECT_TRUE(v.candidates.empty());
  EXPECT_EQ(v.verdict, Verdict::kStable);
}

TEST(Verdict, IdentityIsExcluded) {
  const SplitCase c(1, -1);
  SubbundleCandidate id{EndoField(c.T.grid, 2), "id", 2};
  for (std::size_t i = 0; i < c.T.grid->size(); ++i) id.projector.at(i) = CMat::Identity(2, 2);
  const StabilityVerdict v = verdict_against({id, factor_candidate(c.K, c.E, 1)}, c.K, c.E, c.T.geom, 1e-3);
  ASSERT_EQ(v.candidates.size(), 1u);
  EXPECT_EQ(v.candidates[0].rank, 1);
  EXPECT_EQ(v.verdict, Verdict::kStable);
}

TEST(Verdict, InvalidProjectorNamesCandidate) {
  const SplitCase c(1, -1);
  SubbundleCandidate bad = factor_candidate(c.K, c.E, 0);
  bad.label = "broken";
  bad.projector.at(7) *= 1.1;
  try {
    verdict_against({bad}, c.K, c.E, c.T.geom, 1e-3);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(Probe, FlatTrivialIsInconclusive) {
  const GridPtr g = make_grid(1, 32);
  const CoverPtr cover = std::make_shared<const ChartCover>(g, std::vector<int>{});
  const TwistedBundle E = build_trivial_bundle(build_trivial_twist(cover), 2);
  const TorusGeometry geom = TorusGeometry::flat(g);
  const MetricField K = reference_metric(E);
  const PerturbedProblem P(K, E, geom);
  const SolverTrace t = solve_perturbed(P, {});
  const ProbeReport r = uy_probe(t.s, K, E, geom);
  EXPECT_FALSE(r.conclusive);
  EXPECT_FALSE(r.destabilizing);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Probe, RecoversDestabilizingFactor) {
  const SplitCase& c = unstable();
  const SolverTrace& t = unstable_endpoint();
  const SubbundleCandidate factor = factor_candidate(c.K, c.E, 0);
  const ProbeReport r = uy_probe(t.s, c.K, c.E, c.T.geom, {}, &factor.projector);
  ASSERT_TRUE(r.conclusive) << r.reason;
  ASSERT_EQ(r.levels.size(), 2u);
  ASSERT_EQ(r.projectors.size(), 1u);
  const ProbeProjector& p = r.projectors[0];
  EXPECT_EQ(p.rank, 1);
  ASSERT_TRUE(p.principal_angle.has_value());
  EXPECT_LE(*p.principal_angle, 0.1);
  EXPECT_NEAR(p.degree, 1.0, 0.05);
  EXPECT_LT(r.nu_weighted, -0.5);
  EXPECT_TRUE(r.destabilizing);
}

TEST(Probe, NuFormsAgree) {
  const SplitCase& c = unstable();
  const ProbeReport r = uy_probe(unstable_endpoint().s, c.K, c.E, c.T.geom);
  ASSERT_TRUE(r.conclusive);
  EXPECT_NEAR(r.nu_weighted, r.nu_margins, differential_tol(c.T.grid->h()));
}

TEST(Probe, EigenvaluesAreNearlyConstant) {
  const SplitCase& c = unstable();
  const ProbeReport r = uy_probe(unstable_endpoint().s, c.K, c.E, c.T.geom);
  ASSERT_EQ(r.levels.size(), 2u);
  const double gap = r.levels[1].value - r.levels[0].value;
  EXPECT_GT(gap, 0);
  for (const auto& l : r.levels) EXPECT_LE(l.stddev, 0.05 * gap);
  EXPECT_LE(r.constancy_ratio, 0.05);
}

TEST(Probe, NormalizedLevelsAreTraceFree) {
  // det h = 1 forces tr s = 0, so the normalized levels sum to zero with multiplicity.
  const SplitCase& c = unstable();
  const ProbeReport r = uy_probe(unstable_endpoint().s, c.K, c.E, c.T.geom);
  double acc = 0;
  for (const auto& l : r.levels) acc += l.multiplicity * l.value;
  EXPECT_NEAR(acc, 0.0, 1e-6);
}

}  // namespace
}  // namespace twhe
