#include "twhe/chern.hpp"

#include <cmath>

#include "twhe/errors.hpp"

namespace twhe {

Form11Field c1_form(const MetricField& H, const TwistedBundle& E) {
  const EndForm11 F = curvature(H, E);
  const int comps = F.components();
  Form11Field c1(F.grid());
  for (std::size_t x = 0; x < F.size(); ++x)
    for (int k = 0; k < comps; ++k) c1.at(x, k)(0, 0) = kI / kTwoPi * F.at(x, k).trace();
  return c1;
}

CMat wedge_density(const EndForm11& a, const EndForm11& b, std::size_t x, const CMat& g) {
  // components: 0 = 11, 1 = 12, 2 = 21, 3 = 22
  const CMat w = a.get(x, 0) * b.get(x, 3) + a.get(x, 3) * b.get(x, 0) - a.get(x, 1) * b.get(x, 2) -
                 a.get(x, 2) * b.get(x, 1);
  return w / g.determinant().real();
}

namespace {

void require_n2(const Grid& g, const char* what) {
  if (g.complex_dim() != 2) throw UnsupportedDimensionError(std::string(what) + " needs n = 2");
}

EndForm11 trace_part(const EndForm11& F) {
  EndForm11 t(F.grid(), 1);
  for (std::size_t x = 0; x < F.size(); ++x)
    for (int k = 0; k < F.components(); ++k) t.at(x, k)(0, 0) = F.at(x, k).trace();
  return t;
}

EndForm11 trace_free(const EndForm11& F) {
  EndForm11 out = F;
  const int r = F.rank();
  for (std::size_t x = 0; x < F.size(); ++x)
    for (int k = 0; k < F.components(); ++k) {
      const cd tr = F.at(x, k).trace() / static_cast<double>(r);
      out.at(x, k).diagonal().array() -= tr;
    }
  return out;
}

}  // namespace

RealField c2_density(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom) {
  require_n2(*H.grid(), "c2_density");
  const EndForm11 F = curvature(H, E);
  const EndForm11 T = trace_part(F);
  RealField out(F.grid());
  for (std::size_t x = 0; x < F.size(); ++x) {
    const CMat g = geom.metric(x);
    const cd tt = wedge_density(T, T, x, g)(0, 0);
    const cd ff = wedge_density(F, F, x, g).trace();
    out[x] = (-(tt - ff) / (8 * kPi * kPi)).real();
  }
  return out;
}

double degree(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom) {
  const EndoField L = lambda_F(H, E, geom);
  RealField tr(L.grid());
  for (std::size_t x = 0; x < L.size(); ++x) tr[x] = L.at(x).trace().real();
  return integrate(tr, geom) / kChernNormalization;
}

double slope(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom) {
  return degree(H, E, geom) / E.rank();
}

double form01_norm2(const EndForm01& a, std::size_t x, const CMat& ginv, const CMat& gram) {
  const int n = static_cast<int>(ginv.rows());
  cd acc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += ginv(j, i) * (adjoint(a.get(x, i), gram) * a.get(x, j)).trace();
  return kForm01NormFactor * acc.real();
}

double degree_via_projection(const EndoField& pi, const EndoField& lambdaF, const MetricField& H,
                             const TwistedBundle& E, const TorusGeometry& geom) {
  GaugeContext ctx(E);
  const EndForm01 dpi = d01(pi, ctx);
  RealField dens(pi.grid());
  for (std::size_t x = 0; x < pi.size(); ++x) {
    const CMat gram = H.at(x);
    dens[x] = (pi.get(x) * lambdaF.get(x)).trace().real() - form01_norm2(dpi, x, geom.inverse(x), gram);
  }
  return integrate(dens, geom) / kChernNormalization;
}

double degree_via_projection(const EndoField& pi, const MetricField& H, const TwistedBundle& E,
                             const TorusGeometry& geom) {
  return degree_via_projection(pi, lambda_F(H, E, geom), H, E, geom);
}

double form11_norm2(const EndForm11& F, std::size_t x, const CMat& gi, const CMat& gram) {
  const int n = static_cast<int>(gi.rows());
  cd acc = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int e = 0; e < n; ++e)
        for (int c = 0; c < n; ++c) {
          const cd w = gi(e, a) * gi(b, c);
          if (w == cd(0.0)) continue;
          acc += w * (F.get(x, a * n + b) * adjoint(F.get(x, e * n + c), gram)).trace();
        }
  return acc.real();
}

double bogomolov_number(const MetricField& H, const TwistedBundle& E, const TorusGeometry& geom) {
  require_n2(*H.grid(), "bogomolov_number");
  const EndForm11 F = curvature(H, E);
  const EndForm11 T = trace_part(F);
  const double r = E.rank();
  RealField dens(F.grid());
  for (std::size_t x = 0; x < F.size(); ++x) {
    const CMat g = geom.metric(x);
    const cd tt = wedge_density(T, T, x, g)(0, 0);
    const cd ff = wedge_density(F, F, x, g).trace();
    const cd c2 = -(tt - ff) / (8 * kPi * kPi);
    const cd c1c1 = -tt / (4 * kPi * kPi);
    dens[x] = (2.0 * c2 - (r - 1) / r * c1c1).real();
  }
  return integrate(dens, geom);
}

BogomolovDecomposition bogomolov_decomposition(const MetricField& H, const TwistedBundle& E,
                                               const TorusGeometry& geom) {
  require_n2(*H.grid(), "bogomolov_decomposition");
  const EndForm11 P = trace_free(curvature(H, E));
  const EndoField LP = sqrt_lambda(P, geom);
  RealField wedge(P.grid()), norms(P.grid());
  for (std::size_t x = 0; x < P.size(); ++x) {
    const CMat g = geom.metric(x);
    const CMat gram = H.at(x);
    wedge[x] = wedge_density(P, P, x, g).trace().real();
    const CMat l = LP.get(x);
    norms[x] = form11_norm2(P, x, geom.inverse(x), gram) - endo_inner(l, l, gram).real();
  }
  BogomolovDecomposition d;
  d.lhs = integrate(wedge, geom) / (4 * kPi * kPi);
  d.rhs = integrate(norms, geom) / (4 * kPi * kPi);
  return d;
}

ConformalBound conformal_residual_bound_check(const MetricField& H, const TwistedBundle& E,
                                              const TorusGeometry& geom, const RealField& phi) {
  const Grid& g = *H.grid();
  require_same_grid(*phi.grid(), g, "conformal_residual_bound_check");
  // omega~ = e^{-phi} omega.
  std::vector<CMat> tilde(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) tilde[x] = std::exp(-phi[x]) * geom.metric(x);
  const TorusGeometry geom_t = TorusGeometry::pointwise(geom.grid(), std::move(tilde));

  const EndForm11 F = curvature(H, E);
  const EndoField L = sqrt_lambda(F, geom);
  const EndoField Lt = sqrt_lambda(F, geom_t);
  ConformalBound out;
  RealField tr(H.grid());
  for (std::size_t x = 0; x < g.size(); ++x) tr[x] = L.get(x).trace().real();
  const double deg = integrate(tr, geom) / kChernNormalization;
  out.lambda = kChernNormalization * deg / (E.rank() * geom.volume());
  double sup_phi = -1e300;
  for (std::size_t x = 0; x < g.size(); ++x) sup_phi = std::max(sup_phi, phi[x]);
  double sup_res = 0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    const CMat gram = H.at(x);
    CMat lt = Lt.get(x);
    lt.diagonal().array() -= lt.trace() / static_cast<double>(E.rank());
    out.lhs = std::max(out.lhs, endo_norm(lt, gram));
    CMat l = L.get(x);
    l.diagonal().array() -= out.lambda;
    sup_res = std::max(sup_res, endo_norm(l, gram));
  }
  out.rhs = std::exp(sup_phi) * sup_res;
  return out;
}

}  // namespace twhe
