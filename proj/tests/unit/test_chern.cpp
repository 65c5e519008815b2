#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "twhe/chern.hpp"
#include "twhe/errors.hpp"
#include "twhe/expressions.hpp"

namespace twhe {
namespace {

// n = 2 torus with the cover banded along y1 and y2 for line bundles.
struct SurfaceSetup {
  GridPtr grid;
  CoverPtr cover;
  TwistPtr twist;
  TorusGeometry geom;
  explicit SurfaceSetup(int N)
      : grid(make_grid(2, N)),
        cover(std::make_shared<const ChartCover>(grid, std::vector<int>{1, 3})),
        twist(build_trivial_twist(cover)),
        geom(TorusGeometry::flat(grid)) {}
};

TEST(Chern, FlatTrivialHasNoClasses) {
  SurfaceSetup S(32);
  const TwistedBundle E = build_trivial_bundle(S.twist, 2);
  const MetricField H = reference_metric(E);
  EXPECT_LE(c1_form(H, E).max_abs(), 1e-12);
  EXPECT_LE(c2_density(H, E, S.geom).max_abs(), 1e-12);
  EXPECT_NEAR(bogomolov_number(H, E, S.geom), 0.0, 1e-12);
  const auto d = bogomolov_decomposition(H, E, S.geom);
  EXPECT_NEAR(d.lhs, 0.0, 1e-12);
  EXPECT_NEAR(d.rhs, 0.0, 1e-12);
}

TEST(Chern, ExactFirstClassIntegratesToZero) {
  // H = e^{-u} on the trivial line bundle: c1 is dd^c-exact.
  const GridPtr g = make_grid(1, 64);
  const CoverPtr cover = std::make_shared<const ChartCover>(g, std::vector<int>{});
  const TwistedBundle E = build_trivial_bundle(build_trivial_twist(cover), 1);
  const RealField u = ScalarExpr::parse("cosx + 0.4*sinxy").sample(g);
  const MetricField H = build_compatible_metric(E, [&](int, std::size_t i) { return CMat(CMat::Constant(1, 1, std::exp(-u[i]))); });
  const TorusGeometry geom = TorusGeometry::flat(g);
  EXPECT_GT(c1_form(H, E).max_abs(), 1.0);
  EXPECT_NEAR(degree(H, E, geom), 0.0, 1e-12);
}

TEST(Chern, ThetaDegreeIsWindingNumber) {
  testing::ThetaSetup T;
  const double tol = differential_tol(T.grid->h());
  for (int d : {-2, -1, 0, 1, 2}) {
    const TwistedBundle E = build_theta_bundle(T.twist, d);
    EXPECT_NEAR(degree(reference_metric(E), E, T.geom), d, tol) << d;
    // A different compatible metric: the reference times a smooth bump.
    const MetricField R = reference_metric(E);
    const RealField bump = ScalarExpr::parse("0.3*cosx + 0.2*siny").sample(T.grid);
    const MetricField H2 = R.conformally_scaled(bump);
    EXPECT_NEAR(degree(H2, E, T.geom), d, tol) << d;
    EXPECT_NEAR(degree(H2, E, T.geom), degree(R, E, T.geom), tol) << d;
  }
}

TEST(Chern, DegreeIsAdditiveOnSums) {
  testing::ThetaSetup T;
  const TwistedBundle E = T.split(1, -1);
  EXPECT_NEAR(degree(testing::bumped_metric(E, false), E, T.geom), 0.0, differential_tol(T.grid->h()));
  const TwistedBundle F = T.split(2, 1);
  EXPECT_NEAR(slope(reference_metric(F), F, T.geom), 1.5, differential_tol(T.grid->h()));
}

TEST(Chern, DegreeIsIndependentOfConformalGauduchonMetric) {
  const GridPtr g = make_grid(1, 64);
  const CoverPtr cover = std::make_shared<const ChartCover>(g, std::vector<int>{1});
  const TwistedBundle E = build_theta_bundle(build_trivial_twist(cover), 1);
  const TorusGeometry geom = TorusGeometry::conformal(ScalarExpr::parse("0.5*cosx + 0.3*sinxy").sample(g));
  EXPECT_NEAR(degree(reference_metric(E), E, geom), 1.0, differential_tol(g->h()));
}

TEST(DegreeViaProjection, IdentityZeroAndFactor) {
  testing::ThetaSetup T;
  const TwistedBundle E = T.split(1, -1);
  const MetricField K = testing::bumped_metric(E, false);
  EndoField id(T.grid, 2), zero(T.grid, 2), first(T.grid, 2);
  for (std::size_t i = 0; i < T.grid->size(); ++i) {
    id.at(i) = identity(2);
    first.at(i)(0, 0) = 1.0;  // K is diagonal, so this is K-orthogonal
  }
  const double tol = differential_tol(T.grid->h());
  EXPECT_NEAR(degree_via_projection(id, K, E, T.geom), degree(K, E, T.geom), 1e-12);
  EXPECT_NEAR(degree_via_projection(zero, K, E, T.geom), 0.0, 1e-15);
  const TwistedBundle L = build_theta_bundle(T.twist, 1);
  EXPECT_NEAR(degree_via_projection(first, K, E, T.geom), 1.0, tol);
  EXPECT_NEAR(degree_via_projection(first, K, E, T.geom), degree(reference_metric(L), L, T.geom), tol);
}

TEST(SecondChern, SplitSumIsProductOfFirstClasses) {
  // For F = diag(F1, F2): c2 = -(1/4 pi^2) F1 ^ F2 (density against omega^2/2).
  SurfaceSetup S(32);
  const TwistedBundle L1 = build_theta_bundle(S.twist, 1, 1);
  const TwistedBundle L2 = build_theta_bundle(S.twist, 1, -1);
  const TwistedBundle E = direct_sum({L1, L2});
  const MetricField H = reference_metric(E);
  const EndForm11 F1 = curvature(reference_metric(L1), L1);
  const EndForm11 F2 = curvature(reference_metric(L2), L2);
  const RealField c2 = c2_density(H, E, S.geom);
  double worst = 0;
  for (std::size_t i = 0; i < S.grid->size(); ++i) {
    const cd w = wedge_density(F1, F2, i, S.geom.metric(i))(0, 0);
    worst = std::max(worst, std::abs(c2[i] + w.real() / (4 * kPi * kPi)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Bogomolov, LPlusLVanishesAndLPlusLInverseIsMinusFour) {
  SurfaceSetup S(32);
  const double tol = differential_tol(S.grid->h());
  const TwistedBundle L = build_theta_bundle(S.twist, 1, 1);
  const TwistedBundle Linv = build_theta_bundle(S.twist, -1, -1);
  const TwistedBundle LL = direct_sum({L, L});
  const TwistedBundle LLi = direct_sum({L, Linv});
  EXPECT_NEAR(bogomolov_number(reference_metric(LL), LL, S.geom), 0.0, tol);
  // 2 c2 = -2 c1(L)^2 and c1(L)^2 integrates to 2 for bidegree (1, 1).
  EXPECT_NEAR(bogomolov_number(reference_metric(LLi), LLi, S.geom), -4.0, 0.05 * 4);
  EXPECT_LT(bogomolov_decomposition(reference_metric(LL), LL, S.geom).defect(), tol);
  EXPECT_LT(bogomolov_decomposition(reference_metric(LLi), LLi, S.geom).defect(), tol);
}

TEST(Bogomolov, NeedsSurface) {
  testing::ThetaSetup T(32);
  const TwistedBundle E = T.split(1, 1);
  EXPECT_THROW(bogomolov_number(reference_metric(E), E, T.geom), UnsupportedDimensionError);
}

TEST(ConformalBound, HermitianEinsteinGivesZero) {
  testing::ThetaSetup T(32);
  const TwistedBundle E = build_trivial_bundle(T.twist, 2);
  const auto b = conformal_residual_bound_check(reference_metric(E), E, T.geom, RealField(T.grid));
  EXPECT_NEAR(b.lhs, 0.0, 1e-12);
  EXPECT_NEAR(b.rhs, 0.0, 1e-12);
}

TEST(ConformalBound, StrictForNonConstantCurvature) {
  // Rank 1 has no trace-free curvature, so the left side vanishes while the
  // right side sees sqrt(-1) Lambda F - lambda != 0.
  const GridPtr g = make_grid(1, 64);
  const CoverPtr cover = std::make_shared<const ChartCover>(g, std::vector<int>{});
  const TwistedBundle E = build_trivial_bundle(build_trivial_twist(cover), 1);
  const RealField u = ScalarExpr::parse("cosx").sample(g);
  const MetricField H = build_compatible_metric(E, [&](int, std::size_t i) { return CMat(CMat::Constant(1, 1, std::exp(-u[i]))); });
  const auto b = conformal_residual_bound_check(H, E, TorusGeometry::flat(g), ScalarExpr::parse("cosx").sample(g));
  EXPECT_EQ(b.lhs, 0.0);
  EXPECT_GT(b.rhs, 1.0);
}

TEST(ConformalBound, HoldsOnRankTwo) {
  testing::ThetaSetup T;
  const TwistedBundle E = T.split(1, -1);
  const MetricField H = testing::bumped_metric(E, false);
  for (const char* phi : {"cosx", "0.5*siny + 0.2*cosxy", "rand4"}) {
    const auto b = conformal_residual_bound_check(H, E, T.geom, ScalarExpr::parse(phi).sample(T.grid));
    EXPECT_GT(b.lhs, 0.0) << phi;
    EXPECT_LE(b.lhs, b.rhs + differential_tol(T.grid->h())) << phi;
  }
}

TEST(ConformalBound, PointwiseEigenvalueInequality) {
  // sum (l_j - mean)^2 <= sum (l_j - C)^2 for every C.
  for (double C : {-1.0, 0.0, 0.3, 2.0}) {
    const std::vector<double> l{-0.7, 0.2, 1.4};
    const double mean = (l[0] + l[1] + l[2]) / 3;
    double a = 0, b = 0;
    for (double x : l) {
      a += (x - mean) * (x - mean);
      b += (x - C) * (x - C);
    }
    EXPECT_LE(a, b + 1e-15);
  }
}

}  // namespace
}  // namespace twhe
