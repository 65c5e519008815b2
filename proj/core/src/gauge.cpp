#include "twhe/gauge.hpp"

#include "twhe/errors.hpp"

namespace twhe {

GaugeContext::GaugeContext(const TwistedBundle& E, int radius)
    : E_(std::make_shared<TwistedBundle>(E)), radius_(radius), dims_(E.grid()->real_dim()) {
  const Grid& g = *E.grid();
  const ChartCover& cover = *E.cover();
  const int r = E.rank();
  if (cover.num_charts() > 1 && cover.margin() < radius_)
    throw ShapeError("cover overlap narrower than the stencil");
  slots_.assign(g.size() * dims_ * 2 * radius_, -1);
  for (std::size_t x = 0; x < g.size(); ++x) {
    const int cx = cover.chart_of_record(x);
    for (int a = 0; a < dims_; ++a)
      for (int step = -radius_; step <= radius_; ++step) {
        if (step == 0) continue;
        const std::size_t y = g.shift(x, a, step);
        const int cy = cover.chart_of_record(y);
        if (cy == cx) continue;
        const CMat t = E.transition(cy, cx, y);
        const CMat ti = t.inverse();
        const int k = step < 0 ? step + radius_ : step + radius_ - 1;
        slots_[(x * dims_ + a) * (2 * radius_) + k] = static_cast<std::int32_t>(mats_.size() / (2 * r * r));
        mats_.insert(mats_.end(), t.data(), t.data() + r * r);
        mats_.insert(mats_.end(), ti.data(), ti.data() + r * r);
      }
  }
}

CMat GaugeContext::transport(std::size_t x, int axis, int step) const {
  const int r = rank();
  const std::int32_t s = slot(x, axis, step);
  if (s < 0) return identity(r);
  return Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>>(
      &mats_[static_cast<std::size_t>(s) * 2 * r * r], r, r);
}

CMat GaugeContext::neighbor(const MatrixField& f, int comp, std::size_t x, int axis, int step) const {
  const std::size_t y = step == 0 ? x : grid()->shift(x, axis, step);
  if (step == 0) return f.at(y, comp);
  const std::int32_t s = slot(x, axis, step);
  if (s < 0) return f.at(y, comp);
  const int r = rank();
  using Map = Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>>;
  const cd* base = &mats_[static_cast<std::size_t>(s) * 2 * r * r];
  return Map(base, r, r) * f.at(y, comp) * Map(base + r * r, r, r);
}

namespace {

// D_axis of component `comp` of f at x, in x's gauge.
CMat diff(const MatrixField& f, int comp, std::size_t x, int axis, const GaugeContext& ctx) {
  const Grid& g = *ctx.grid();
  const Stencil& st = g.stencil();
  CMat acc = CMat::Zero(f.rank(), f.rank());
  for (std::size_t q = 0; q < st.offsets.size(); ++q)
    acc += st.weights[q] * ctx.neighbor(f, comp, x, axis, st.offsets[q]);
  return acc / g.spacing(axis);
}

template <class Out>
Out d_complex(const MatrixField& s, int comp, const GaugeContext& ctx, double sign) {
  const Grid& g = *ctx.grid();
  Out out(ctx.grid(), s.rank());
  for (std::size_t x = 0; x < g.size(); ++x)
    for (int a = 0; a < g.complex_dim(); ++a)
      out.at(x, a) = 0.5 * (diff(s, comp, x, 2 * a, ctx) + sign * kI * diff(s, comp, x, 2 * a + 1, ctx));
  return out;
}

}  // namespace

EndForm10 d10(const EndoField& s, const GaugeContext& ctx) {
  return d_complex<EndForm10>(s, 0, ctx, -1.0);
}

EndForm01 d01(const EndoField& s, const GaugeContext& ctx) {
  return d_complex<EndForm01>(s, 0, ctx, 1.0);
}

EndForm10 covariant_d10(const EndoField& s, const EndForm10& A, const GaugeContext& ctx) {
  EndForm10 out = d10(s, ctx);
  const int n = ctx.grid()->complex_dim();
  for (std::size_t x = 0; x < out.size(); ++x) {
    const CMat sx = s.at(x);
    for (int a = 0; a < n; ++a) {
      const CMat Ax = A.at(x, a);
      out.at(x, a) += Ax * sx - sx * Ax;
    }
  }
  return out;
}

EndForm11 dbar_form10(const EndForm10& Y, const GaugeContext& ctx) {
  const Grid& g = *ctx.grid();
  const int n = g.complex_dim();
  EndForm11 out(ctx.grid(), Y.rank());
  for (std::size_t x = 0; x < g.size(); ++x)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const CMat dbar = 0.5 * (diff(Y, a, x, 2 * b, ctx) + kI * diff(Y, a, x, 2 * b + 1, ctx));
        out.at(x, a * n + b) = 2.0 * kI * dbar;
      }
  return out;
}

EndoField sqrt_lambda(const EndForm11& F, const TorusGeometry& geom) {
  const Grid& g = *F.grid();
  require_same_grid(g, *geom.grid(), "sqrt_lambda");
  const int n = g.complex_dim();
  EndoField out(F.grid(), F.rank());
  for (std::size_t x = 0; x < g.size(); ++x) {
    const CMat gi = geom.inverse(x);
    CMat acc = CMat::Zero(F.rank(), F.rank());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc += gi(b, a) * F.at(x, a * n + b);
    out.at(x) = kI * acc;
  }
  return out;
}

}  // namespace twhe
