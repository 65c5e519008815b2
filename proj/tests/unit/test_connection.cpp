#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "twhe/connection.hpp"
#include "twhe/expressions.hpp"

namespace twhe {
namespace {

CoverPtr four_chart_cover(int N = 32) {
  return std::make_shared<const ChartCover>(make_grid(1, N), std::vector<int>{0, 1});
}

// Rank-1 trivial bundle on a single-chart torus with H = e^{-u}.
struct ScalarCase {
  GridPtr grid = make_grid(1, 64);
  CoverPtr cover = std::make_shared<const ChartCover>(grid, std::vector<int>{});
  TwistedBundle E = build_trivial_bundle(build_trivial_twist(cover), 1);
  RealField u;
  MetricField H;
  explicit ScalarCase(const std::string& expr) : u(ScalarExpr::parse(expr).sample(grid)) {
    H = build_compatible_metric(E, [&](int, std::size_t i) { return CMat(CMat::Constant(1, 1, std::exp(-u[i]))); });
  }
};

TEST(Connection, IdentityMetricIsFlat) {
  const CoverPtr cover = four_chart_cover();
  const TwistedBundle E = build_trivial_bundle(build_trivial_twist(cover), 2);
  const MetricField H = build_compatible_metric(E, [](int, std::size_t) { return identity(2); });
  const ChernConnection c = chern_connection(H, E);
  EXPECT_LE(c.A.max_abs(), 1e-14);
  EXPECT_LE(curvature(H, E).max_abs(), 1e-12);
}

TEST(Connection, ScalarMetricGivesMinusDu) {
  // u = cos(2 pi x) + 0.5 sin(2 pi y): d_z u = (u_x - i u_y) / 2.
  ScalarCase S("cosx + 0.5*siny");
  const EndForm10 A = chern_connection(S.H, S.E).A;
  const Grid& g = *S.grid;
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = kTwoPi * g.coordinate(i, 0), y = kTwoPi * g.coordinate(i, 1);
    const cd du = 0.5 * cd(-kTwoPi * std::sin(x), -0.5 * kTwoPi * std::cos(y));
    worst = std::max(worst, std::abs(A.get(i, 0)(0, 0) + du));
  }
  EXPECT_LT(worst, 2e-4);  // fourth-order stencil, h = 1/64
}

TEST(Connection, ClockShiftFlatMetricGluesExactly) {
  const CoverPtr cover = four_chart_cover();
  const TwistedBundle E = build_clock_shift_bundle(build_clock_shift_twist(cover, 2), 2);
  const MetricField H = build_compatible_metric(E, [](int, std::size_t) { return identity(2); });
  const ChernConnection c = chern_connection(H, E);
  EXPECT_LE(c.A.max_abs(), 1e-14);
  EXPECT_LE(c.gluing_defect, 1e-14);
  EXPECT_LE(curvature_gauge_defect(H, E), 1e-12);
}

TEST(Curvature, ScalarMetricIsHalfLaplacian) {
  // sqrt(-1) Lambda F = (1/2) Laplacian u for H = e^{-u} on the unit torus.
  ScalarCase S("cosx");
  const Grid& g = *S.grid;
  const EndoField lf = lambda_F(S.H, S.E, TorusGeometry::flat(S.grid));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double c = std::cos(kTwoPi * g.coordinate(i, 0));
      EXPECT_NEAR(lf.get(i)(0, 0).real(), -2 * kPi * kPi * c, 2e-3);
    EXPECT_NEAR(lf.get(i)(0, 0).imag(), 0.0, 1e-12);
  }
}

TEST(Curvature, GlobalBShiftsByConstant) {
  const CoverPtr cover = four_chart_cover();
  const TorusGeometry geom = TorusGeometry::flat(cover->grid());
  const double c = 0.75;
  const TwistedBundle E = build_trivial_bundle(build_constant_B(cover, c, geom), 2);
  const MetricField H = build_compatible_metric(E, [](int, std::size_t) { return identity(2); });
  const EndoField lf = lambda_F(H, E, geom);
  for (std::size_t i = 0; i < cover->grid()->size(); ++i)
    EXPECT_LT((lf.get(i) + c * CMat(identity(2))).norm(), 1e-12);
}

TEST(Curvature, ThetaTraceIntegralIsTwoPiDegree) {
  testing::ThetaSetup T;
  for (int d : {-1, 1, 2}) {
    const TwistedBundle E = build_theta_bundle(T.twist, d);
    const EndoField lf = lambda_F(reference_metric(E), E, T.geom);
    RealField tr(T.grid);
    for (std::size_t i = 0; i < T.grid->size(); ++i) tr[i] = lf.get(i).trace().real();
    EXPECT_NEAR(integrate(tr, T.geom), kTwoPi * d, kTwoPi * differential_tol(T.grid->h())) << d;
  }
}

TEST(Curvature, IncrementalMatchesDirect) {
  // For two compatible metrics K, K', s = log(K^{-1} K') is a global
  // K-self-adjoint section and F(K e^s) assembled from F_K must match F(K').
  testing::ThetaSetup T;
  const TwistedBundle E = T.split(1, 1);
  const MetricField K = testing::bumped_metric(E, false);
  const MetricField K2 = testing::bumped_metric(E, true);
  const GaugeContext ctx(E);
  EndoField s(T.grid, 2);
  for (std::size_t i = 0; i < T.grid->size(); ++i) s.at(i) = endo_log(CMat(K.at(i).inverse() * K2.at(i)), K.at(i));
  const EndForm11 direct = curvature(K2, E);
  const EndForm11 inc = curvature_incremental(curvature(K, E), chern_connection(K, E).A, s, K, ctx);
  EXPECT_LT(testing::max_entry_distance(direct, inc), differential_tol(T.grid->h()));
  const MetricField H = metric_from_log(K, s, E);
  double worst = 0;
  for (std::size_t i = 0; i < T.grid->size(); ++i) worst = std::max(worst, (H.at(i) - K2.at(i)).norm());
  EXPECT_LT(worst, 1e-10);
}

}  // namespace
}  // namespace twhe
