#include "twhe/connection.hpp"

#include <cmath>

#include "twhe/errors.hpp"
#include "twhe/spectral.hpp"

namespace twhe {

namespace {

// d_a of the conformal factor at every point (zero field when absent).
std::vector<std::vector<cd>> conformal_gradient(const MetricField& H) {
  const Grid& g = *H.grid();
  std::vector<std::vector<cd>> out;
  if (!H.conformal_log()) return out;
  std::vector<cd> phi(H.conformal_log()->data().begin(), H.conformal_log()->data().end());
  for (int a = 0; a < g.complex_dim(); ++a) out.push_back(d_z(g, phi, a));
  return out;
}

cd gamma_at(const TwistedBundle& E, int chart, std::size_t idx, int a) {
  const TwistData& t = *E.twist();
  if (!t.has_beta()) return 0.0;
  const ChartCover& cover = *E.cover();
  cd acc = 0;
  for (int k = 0; k < cover.num_charts(); ++k)
    if (k != chart && cover.contains(k, idx)) acc += cover.partition(k, idx) * t.beta_at(chart, k, a, idx);
  return acc;
}

}  // namespace

EndForm10 chart_connection(const MetricField& H, const TwistedBundle& E, int c) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  const int n = g.complex_dim();
  const int r = E.rank();
  const int R = g.stencil().radius;
  const Stencil& st = g.stencil();
  const auto dphi = conformal_gradient(H);
  EndForm10 A(cover.grid(), r);
  for (std::size_t y = 0; y < g.size(); ++y) {
    if (!cover.stencil_inside(c, y, R)) continue;
    const CMat gi = CMat(H.base_at(c, y)).inverse();
    for (int a = 0; a < n; ++a) {
      CMat dx = CMat::Zero(r, r), dy = CMat::Zero(r, r);
      for (std::size_t q = 0; q < st.offsets.size(); ++q) {
        dx += st.weights[q] * H.base_at(c, g.shift(y, 2 * a, st.offsets[q]));
        dy += st.weights[q] * H.base_at(c, g.shift(y, 2 * a + 1, st.offsets[q]));
      }
      const CMat dG = 0.5 * (dx / g.spacing(2 * a) - kI * dy / g.spacing(2 * a + 1));
      CMat Ay = gi * dG;
      cd scalar = gamma_at(E, c, y, a);
      if (!dphi.empty()) scalar += dphi[a][y];
      Ay.diagonal().array() += scalar;
      A.at(y, a) = Ay;
    }
  }
  return A;
}

namespace {

// Curvature in chart c; with record_only, F is filled only where c is the
// chart of record.
EndForm11 chart_curvature_impl(const MetricField& H, const TwistedBundle& E, int c, bool record_only) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  const int n = g.complex_dim();
  const int r = E.rank();
  const int R = g.stencil().radius;
  const Stencil& st = g.stencil();
  const EndForm10 A = chart_connection(H, E, c);
  const TwistData& tw = *E.twist();
  EndForm11 F(cover.grid(), r);
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (record_only && cover.chart_of_record(x) != c) continue;
    if (!cover.stencil_inside(c, x, 2 * R)) continue;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        CMat dx = CMat::Zero(r, r), dy = CMat::Zero(r, r);
        for (std::size_t q = 0; q < st.offsets.size(); ++q) {
          dx += st.weights[q] * A.at(g.shift(x, 2 * b, st.offsets[q]), a);
          dy += st.weights[q] * A.at(g.shift(x, 2 * b + 1, st.offsets[q]), a);
        }
        CMat f = kI * (dx / g.spacing(2 * b) + kI * dy / g.spacing(2 * b + 1));
        f.diagonal().array() -= tw.B_at(c, x, a, b);
        F.at(x, a * n + b) = f;
      }
  }
  return F;
}

}  // namespace

EndForm11 chart_curvature(const MetricField& H, const TwistedBundle& E, int c) {
  return chart_curvature_impl(H, E, c, false);
}

ChernConnection chern_connection(const MetricField& H, const TwistedBundle& E, bool check_gluing) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  const int n = g.complex_dim();
  const int nc = cover.num_charts();
  const int R = g.stencil().radius;
  const Stencil& st = g.stencil();
  ChernConnection out;
  out.A = EndForm10(cover.grid(), E.rank());
  std::vector<EndForm10> per_chart;
  for (int c = 0; c < nc; ++c) per_chart.push_back(chart_connection(H, E, c));
  for (std::size_t x = 0; x < g.size(); ++x) {
    const int c = cover.chart_of_record(x);
    for (int a = 0; a < n; ++a) out.A.at(x, a) = per_chart[c].at(x, a);
  }
  if (!check_gluing) return out;
  const TwistData& tw = *E.twist();
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      if (i == j) continue;
      for (std::size_t x : cover.intersection({i, j}, R)) {
        const CMat phi = E.transition(i, j, x);
        const CMat inv = phi.inverse();
        for (int a = 0; a < n; ++a) {
          CMat dx = CMat::Zero(E.rank(), E.rank()), dy = dx;
          for (std::size_t q = 0; q < st.offsets.size(); ++q) {
            dx += st.weights[q] * E.transition(i, j, g.shift(x, 2 * a, st.offsets[q]));
            dy += st.weights[q] * E.transition(i, j, g.shift(x, 2 * a + 1, st.offsets[q]));
          }
          const CMat dphi = 0.5 * (dx / g.spacing(2 * a) - kI * dy / g.spacing(2 * a + 1));
          CMat expect = inv * per_chart[j].get(x, a) * phi + inv * dphi;
          expect.diagonal().array() += tw.beta_at(i, j, a, x);
          out.gluing_defect =
              std::max(out.gluing_defect, (per_chart[i].get(x, a) - expect).cwiseAbs().maxCoeff());
        }
      }
    }
  return out;
}

EndForm11 curvature(const MetricField& H, const TwistedBundle& E) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  const int comps = g.complex_dim() * g.complex_dim();
  EndForm11 F(cover.grid(), E.rank());
  for (int c = 0; c < cover.num_charts(); ++c) {
    const EndForm11 Fc = chart_curvature_impl(H, E, c, true);
    for (std::size_t x = 0; x < g.size(); ++x)
      if (cover.chart_of_record(x) == c)
        for (int k = 0; k < comps; ++k) F.at(x, k) = Fc.at(x, k);
  }
  return F;
}

double curvature_gauge_defect(const MetricField& H, const TwistedBundle& E) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  const int comps = g.complex_dim() * g.complex_dim();
  const int nc = cover.num_charts();
  const int R = g.stencil().radius;
  std::vector<EndForm11> Fc;
  for (int c = 0; c < nc; ++c) Fc.push_back(chart_curvature(H, E, c));
  double m = 0;
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j)
      for (std::size_t x : cover.intersection({i, j}, 2 * R)) {
        const CMat phi = E.transition(j, i, x);
        const CMat inv = phi.inverse();
        for (int k = 0; k < comps; ++k)
          m = std::max(m, (Fc[i].get(x, k) - phi * Fc[j].get(x, k) * inv).cwiseAbs().maxCoeff());
      }
  return m;
}

EndoField lambda_F(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom) {
  return sqrt_lambda(curvature(H, E), geom);
}

EndForm11 curvature_incremental(const EndForm11& FK, const EndForm10& AK, const EndoField& s,
                                const MetricField& K, const GaugeContext& ctx) {
  const EndForm10 ds = covariant_d10(s, AK, ctx);
  EndForm10 Y(ds.grid(), ds.rank());
  static_cast<MatrixField&>(Y) = psi_apply(s, ds, dexp_kernel(), K);
  EndForm11 F = dbar_form10(Y, ctx);
  F += FK;
  return F;
}

MetricField metric_from_log(const MetricField& K, const EndoField& s, const TwistedBundle& E) {
  const ChartCover& cover = *E.cover();
  const Grid& g = *cover.grid();
  MetricField H = K;
  for (std::size_t x = 0; x < g.size(); ++x) {
    const int cx = cover.chart_of_record(x);
    const CMat sx = s.get(x);
    for (int c = 0; c < cover.num_charts(); ++c) {
      if (!cover.contains(c, x)) continue;
      const CMat phi = E.transition(cx, c, x);
      const CMat sc = phi * sx * phi.inverse();
      const CMat gk = K.base_at(c, x);
      CMat gh = gk * endo_exp(sc, gk);
      gh = 0.5 * (gh + gh.adjoint());
      H.set_base(c, x, gh);
    }
  }
  H.id = K.id + "*exp(s)";
  return H;
}

}  // namespace twhe
