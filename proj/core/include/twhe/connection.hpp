#pragma once

#include "twhe/gauge.hpp"
#include "twhe/geometry.hpp"
#include "twhe/metric.hpp"

namespace twhe {

// Chern connection A = G^{-1} dG (+ d(phi) for the conformal factor, + a
// partition-of-unity correction gamma_i = sum_k rho_k beta_ik when the twist
// has nonzero beta) in chart-of-record gauge. `gluing_defect` is the sup on
// overlaps of |A_i - (phi^{-1} A_j phi + phi^{-1} d phi + beta_ij)|.
struct ChernConnection {
  EndForm10 A;
  double gluing_defect = 0;
};
ChernConnection chern_connection(const MetricField& H, const TwistedBundle& E, bool check_gluing = true);

// Connection and curvature of one chart, valid on the points whose stencil
// box (radius R, resp. 2R) lies in the chart.
EndForm10 chart_connection(const MetricField& H, const TwistedBundle& E, int chart);
EndForm11 chart_curvature(const MetricField& H, const TwistedBundle& E, int chart);

// F = dbar A - B Id, stored (1,1) coefficients, chart-of-record gauge.
EndForm11 curvature(const MetricField& H, const TwistedBundle& E);
// sup on overlaps of |F_i - phi_ji F_j phi_ji^{-1}|.
double curvature_gauge_defect(const MetricField& H, const TwistedBundle& E);

// sqrt(-1) Lambda_omega F.
EndoField lambda_F(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom);

// F_H for H = K e^s, from F_K: F_K + dbar(psi_apply(s, d_K s)).
EndForm11 curvature_incremental(const EndForm11& FK, const EndForm10& AK, const EndoField& s,
                                const MetricField& K, const GaugeContext& ctx);

// The metric H = K h with h = e^s, s given in chart-of-record gauge.
MetricField metric_from_log(const MetricField& K, const EndoField& s, const TwistedBundle& E);

}  // namespace twhe
