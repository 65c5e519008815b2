#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "twhe/errors.hpp"
#include "twhe/expressions.hpp"
#include "twhe/solver.hpp"

namespace twhe {
namespace {

// Rank-1 (or rank-r diagonal) trivial bundle on a single-chart flat torus.
struct TrivialCase {
  GridPtr grid = make_grid(1, 64);
  CoverPtr cover = std::make_shared<const ChartCover>(grid, std::vector<int>{});
  TorusGeometry geom = TorusGeometry::flat(grid);
  TwistedBundle E;
  explicit TrivialCase(int r) : E(build_trivial_bundle(build_trivial_twist(cover), r)) {}
};

TEST(SolverOptions, Validation) {
  SolverOptions o;
  EXPECT_NO_THROW(o.validate());
  o.epsilon = 0;
  EXPECT_THROW(o.validate(), DomainError);
  o = {};
  o.epsilon = 1.5;
  EXPECT_THROW(o.validate(), DomainError);
  o = {};
  o.step_size = 0;
  EXPECT_THROW(o.validate(), DomainError);
}

TEST(Normalize, FlatTrivialIsUnchanged) {
  TrivialCase T(2);
  const MetricField K = reference_metric(T.E);
  double mean = -1;
  const MetricField N = normalize_background(K, T.E, T.geom, &mean);
  EXPECT_EQ(mean, 0.0);
  for (std::size_t i = 0; i < T.grid->size(); ++i) EXPECT_LT((N.at(i) - K.at(i)).norm(), 1e-14);
}

TEST(Normalize, ScalarMetricBecomesConstant) {
  // K = e^{cos 2 pi x} on the trivial line bundle: normalization removes the
  // factor up to a constant scale.
  TrivialCase T(1);
  const RealField psi = ScalarExpr::parse("cosx").sample(T.grid);
  const MetricField K = reference_metric(T.E).conformally_scaled(psi);
  double mean = -1;
  const MetricField N = normalize_background(K, T.E, T.geom, &mean);
  EXPECT_LE(mean, 1e-9 * T.geom.volume());
  const double c = N.at(0)(0, 0).real();
  for (std::size_t i = 0; i < T.grid->size(); ++i) EXPECT_NEAR(N.at(i)(0, 0).real() / c, 1.0, 1e-9);
  EXPECT_LT(PerturbedProblem(N, T.E, T.geom).phi_background().max_abs(), 1e-9);
}

TEST(Coordinates, RoundTripAndSelfAdjointness) {
  testing::ThetaSetup T(32);
  const TwistedBundle E = T.split(1, 1);
  const MetricField K = testing::bumped_metric(E, false);
  const PerturbedProblem P(K, E, T.geom);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(P.coords_per_point() * T.grid->size(), -1, 1);
  v = v.array().sin();
  const EndoField s = P.from_coords(v);
  EXPECT_LT((P.to_coords(s) - v).norm(), 1e-12 * v.norm());
  for (std::size_t i = 0; i < T.grid->size(); ++i) EXPECT_LT((adjoint(s.get(i), K.at(i)) - s.get(i)).norm(), 1e-12);
}

TEST(Coordinates, PhiIsSelfAdjointUpToDiscretization) {
  // s = log(K^{-1} K') for a second compatible metric K' is smooth and global.
  testing::ThetaSetup T;
  const TwistedBundle E = T.split(1, 1);
  const MetricField K = testing::bumped_metric(E, false);
  const MetricField K2 = testing::bumped_metric(E, true);
  const PerturbedProblem P(K, E, T.geom);
  EndoField s(T.grid, 2);
  for (std::size_t i = 0; i < T.grid->size(); ++i) s.at(i) = endo_log(CMat(K.at(i).inverse() * K2.at(i)), K.at(i));
  double skew = 0;
  const double full = P.sup_norm_h(P.phi(s), s, &skew);
  EXPECT_GT(full, 1.0);
  EXPECT_LT(skew, differential_tol(T.grid->h()));
}

TEST(Solve, FlatTrivialFixedPoint) {
  TrivialCase T(2);
  const PerturbedProblem P(reference_metric(T.E), T.E, T.geom);
  const SolverTrace t = solve_perturbed(P, {});
  EXPECT_EQ(t.status, SolveStatus::kConverged);
  EXPECT_LE(t.history.size(), 2u);
  EXPECT_EQ(t.residual, 0.0);
  EXPECT_EQ(t.max_log_h, 0.0);
}

TEST(Solve, ClockShiftFixedPoint) {
  const CoverPtr cover = std::make_shared<const ChartCover>(make_grid(1, 32), std::vector<int>{0, 1});
  const TwistedBundle E = build_clock_shift_bundle(build_clock_shift_twist(cover, 2), 2);
  const PerturbedProblem P(reference_metric(E), E, TorusGeometry::flat(cover->grid()));
  SolverOptions o;
  o.residual_tol = 1e-12;
  const SolverTrace t = solve_perturbed(P, o);
  EXPECT_EQ(t.status, SolveStatus::kConverged);
  EXPECT_LE(t.residual, 1e-12);
  EXPECT_LE(t.max_log_h, 1e-12);
}

TEST(Solve, RankOneHelmholtzOracle) {
  TrivialCase T(1);
  const RealField psi = ScalarExpr::parse("cosx").sample(T.grid);
  const PerturbedProblem P(reference_metric(T.E).conformally_scaled(psi), T.E, T.geom);
  SolverOptions o;
  o.epsilon = 0.1;
  const SolverTrace t = solve_perturbed(P, o);
  ASSERT_EQ(t.status, SolveStatus::kConverged);
  const RealField oracle = testing::helmholtz_oracle(psi, 0.1, T.geom);
  const double factor = testing::helmholtz_continuum_factor(0.1);
  double err = 0, cont = 0;
  for (std::size_t i = 0; i < T.grid->size(); ++i) {
    err = std::max(err, std::abs(t.s.get(i)(0, 0) - oracle[i]));
    cont = std::max(cont, std::abs(t.s.get(i)(0, 0) - factor * psi[i]));
  }
  EXPECT_LT(err, 1e-9);
  EXPECT_LT(cont, 1e-6);
  EXPECT_GT(t.lemma31_bound_slack, 0.0);
  // Scalar reduction: integral (sqrt(-1) Lambda dbar d psi) s + |dbar s|^2 = -eps integral s^2.
  const Lemma32Report l = check_lemma32(P, t.s, 0.1, o.residual_tol);
  EXPECT_LE(l.defect, l.budget);
  EXPECT_LE(l.pointwise_defect, differential_tol(T.grid->h()));
  RealField s2(T.grid);
  for (std::size_t i = 0; i < T.grid->size(); ++i) s2[i] = oracle[i] * oracle[i];
  EXPECT_NEAR(l.rhs, -0.1 * integrate(s2, T.geom), 1e-9);
}

TEST(Solve, DeterminantStaysOneAfterNormalization) {
  TrivialCase T(2);
  const RealField psi = ScalarExpr::parse("cosx + 0.5*siny").sample(T.grid);
  const MetricField K0 = build_compatible_metric(T.E, [&](int, std::size_t i) {
    CMat m = identity(2);
    m(0, 0) = std::exp(psi[i]);
    return m;
  });
  const MetricField K = normalize_background(K0, T.E, T.geom);
  const PerturbedProblem P(K, T.E, T.geom);
  SolverOptions o;
  o.epsilon = 0.1;
  const SolverTrace t = solve_perturbed(P, o);
  ASSERT_EQ(t.status, SolveStatus::kConverged);
  EXPECT_GT(t.max_log_h, 0.1);
  EXPECT_LE(t.det_drift, 1e-8);
}

TEST(Lemmas, IdentityIsTrivial) {
  TrivialCase T(2);
  const PerturbedProblem P(reference_metric(T.E), T.E, T.geom);
  const EndoField zero(T.grid, 2);
  const Lemma31Report a = check_lemma31(P, zero, 0.1);
  EXPECT_EQ(a.pointwise_defect, 0.0);
  EXPECT_EQ(a.bound2_slack, 0.0);
  const Lemma32Report b = check_lemma32(P, zero, 0.1, 1e-10);
  EXPECT_EQ(b.lhs, 0.0);
  EXPECT_EQ(b.rhs, 0.0);
  EXPECT_EQ(b.defect, 0.0);
}

TEST(Lemmas, UnstableRankTwoIdentityAndBound) {
  testing::ThetaSetup T;
  const TwistedBundle E = T.split(1, -1);
  const MetricField K = normalize_background(testing::bumped_metric(E, false), E, T.geom);
  const PerturbedProblem P(K, E, T.geom);
  SolverOptions o;
  o.epsilon = 0.1;
  o.residual_tol = 1e-9;
  const SolverTrace t = solve_perturbed(P, o);
  ASSERT_EQ(t.status, SolveStatus::kConverged);
  const Lemma32Report l = check_lemma32(P, t.s, 0.1, o.residual_tol);
  EXPECT_LE(l.defect, l.budget);
  EXPECT_GE(l.psi_term, 0.0);
  EXPECT_LE(l.pointwise_defect, differential_tol(T.grid->h()));
  EXPECT_GE(t.lemma31_bound_slack, 0.0);
  // Case 2 of the dichotomy: the residual stays far from zero.
  EXPECT_GT(t.phi_residual, 1.0);
}

TEST(Sweep, FlatTrivialAllZero) {
  TrivialCase T(2);
  const PerturbedProblem P(reference_metric(T.E), T.E, T.geom);
  const auto traces = epsilon_sweep(P, {0.3, 0.1, 0.03, 0.01}, {});
  ASSERT_EQ(traces.size(), 4u);
  for (const auto& t : traces) {
    EXPECT_TRUE(t.error.empty());
    EXPECT_EQ(t.residual, 0.0);
    EXPECT_EQ(t.phi_residual, 0.0);
  }
}

TEST(Sweep, RejectsIncreasingSchedule) {
  TrivialCase T(1);
  const PerturbedProblem P(reference_metric(T.E), T.E, T.geom);
  EXPECT_THROW(epsilon_sweep(P, {0.1, 0.3}, {}), DomainError);
}

TEST(Sweep, WarmStartPreservesOracle) {
  TrivialCase T(1);
  const RealField psi = ScalarExpr::parse("cosx").sample(T.grid);
  const PerturbedProblem P(reference_metric(T.E).conformally_scaled(psi), T.E, T.geom);
  const auto traces = epsilon_sweep(P, {0.3, 0.1}, {});
  const RealField oracle = testing::helmholtz_oracle(psi, 0.1, T.geom);
  double err = 0;
  for (std::size_t i = 0; i < T.grid->size(); ++i) err = std::max(err, std::abs(traces[1].s.get(i)(0, 0) - oracle[i]));
  EXPECT_LT(err, 1e-9);
}

}  // namespace
}  // namespace twhe
