#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "twhe/bundle.hpp"
#include "twhe/geometry.hpp"
#include "twhe/metric.hpp"
#include "twhe/spectral.hpp"
#include "twhe/twist.hpp"

namespace twhe::testing {

// 1D torus with the trivial twist on a cover banded along y1, the cover the
// theta bundles need.
struct ThetaSetup {
  GridPtr grid;
  CoverPtr cover;
  TwistPtr twist;
  TorusGeometry geom;

  explicit ThetaSetup(int resolution = 64)
      : grid(make_grid(1, resolution)),
        cover(std::make_shared<const ChartCover>(grid, std::vector<int>{1})),
        twist(build_trivial_twist(cover)),
        geom(TorusGeometry::flat(grid)) {}

  TwistedBundle split(int d1, int d2) const {
    return direct_sum({build_theta_bundle(twist, d1), build_theta_bundle(twist, d2)});
  }
};

// R^{1/2} exp(M) R^{1/2} with R the reference metric and M a smooth
// Hermitian bump. `coupled` keeps the off-diagonal part of M.
inline MetricField bumped_metric(const TwistedBundle& E, bool coupled) {
  const Grid& g = *E.grid();
  const MetricField R = reference_metric(E);
  return build_compatible_metric(E, [&](int c, std::size_t i) {
    const double x = kTwoPi * g.coordinate(i, 0), y = kTwoPi * g.coordinate(i, 1);
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = 0.3 * std::cos(x);
    m(1, 1) = -0.2 * std::cos(y);
    if (coupled) {
      m(0, 1) = 0.2 * cd(std::sin(x), std::cos(y));
      m(1, 0) = std::conj(m(0, 1));
    }
    const CMat rh = CMat(R.base_at(c, i)).cwiseSqrt();
    return CMat(rh * endo_exp(m, identity(2)) * rh);
  });
}

inline double max_entry_distance(const MatrixField& a, const MatrixField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace twhe::testing
