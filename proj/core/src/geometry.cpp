#include "twhe/geometry.hpp"

#include <cmath>

#include "twhe/errors.hpp"

namespace twhe {

namespace {

CMat default_base(int n, const std::optional<CMat>& base) {
  if (!base) return identity(n);
  if (base->rows() != n || base->cols() != n) throw ShapeError("base metric has wrong size");
  if ((*base - base->adjoint()).norm() > kAlgebraicTol * (1 + base->norm()))
    throw DomainError("base metric is not Hermitian");
  check_positive(*base, "base metric");
  return *base;
}

}  // namespace

TorusGeometry TorusGeometry::flat(GridPtr grid, std::optional<CMat> base) {
  TorusGeometry g;
  g.grid_ = std::move(grid);
  g.base_ = default_base(g.grid_->complex_dim(), base);
  g.base_inv_ = g.base_.inverse();
  g.base_det_ = g.base_.determinant().real();
  return g;
}

TorusGeometry TorusGeometry::conformal(RealField log_factor, std::optional<CMat> base) {
  TorusGeometry g = flat(log_factor.grid(), std::move(base));
  g.log_factor_ = std::move(log_factor);
  g.id = "conformal";
  return g;
}

TorusGeometry TorusGeometry::pointwise(GridPtr grid, std::vector<CMat> metric) {
  TorusGeometry g = flat(grid);
  if (metric.size() != grid->size()) throw ShapeError("metric field has wrong size");
  for (const auto& m : metric) {
    if (m.rows() != grid->complex_dim()) throw ShapeError("metric matrix has wrong size");
    check_positive(m, "torus metric");
  }
  g.pointwise_ = std::move(metric);
  g.id = "pointwise";
  return g;
}

CMat TorusGeometry::metric(std::size_t idx) const {
  if (!pointwise_.empty()) return pointwise_[idx];
  return conformal_weight(idx) * base_;
}

CMat TorusGeometry::inverse(std::size_t idx) const {
  if (!pointwise_.empty()) return pointwise_[idx].inverse();
  return base_inv_ / conformal_weight(idx);
}

double TorusGeometry::volume_density(std::size_t idx) const {
  if (!pointwise_.empty()) return pointwise_[idx].determinant().real();
  return std::pow(conformal_weight(idx), complex_dim()) * base_det_;
}

double TorusGeometry::volume() const {
  double acc = 0;
  for (std::size_t i = 0; i < grid_->size(); ++i) acc += volume_density(i);
  return acc * grid_->cell_volume();
}

ComplexField contract_lambda(const Form11Field& f, const TorusGeometry& geom) {
  require_same_grid(*f.grid(), *geom.grid(), "contract_lambda");
  const int n = geom.complex_dim();
  ComplexField out(geom.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const CMat gi = geom.inverse(i);
    cd acc = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc += gi(b, a) * f.coeff(i, a, b);
    out[i] = acc;
  }
  return out;
}

double integrate(const RealField& f, const TorusGeometry& geom) {
  require_same_grid(*f.grid(), *geom.grid(), "integrate");
  double acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * geom.volume_density(i);
  return acc * geom.grid()->cell_volume();
}

cd integrate(const ComplexField& f, const TorusGeometry& geom) {
  require_same_grid(*f.grid(), *geom.grid(), "integrate");
  cd acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * geom.volume_density(i);
  return acc * geom.grid()->cell_volume();
}

void diff_axis(const Grid& g, const cd* in, cd* out, int axis, std::size_t stride) {
  const Stencil& st = g.stencil();
  const double inv_h = 1.0 / g.spacing(axis);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t k = 0; k < stride; ++k) out[i * stride + k] = 0;
    for (std::size_t t = 0; t < st.offsets.size(); ++t) {
      const std::size_t j = g.shift(i, axis, st.offsets[t]);
      const double w = st.weights[t] * inv_h;
      for (std::size_t k = 0; k < stride; ++k) out[i * stride + k] += w * in[j * stride + k];
    }
  }
}

static std::vector<cd> d_complex(const Grid& g, const std::vector<cd>& f, int a, double sign) {
  std::vector<cd> dx(f.size()), dy(f.size());
  diff_axis(g, f.data(), dx.data(), 2 * a);
  diff_axis(g, f.data(), dy.data(), 2 * a + 1);
  for (std::size_t i = 0; i < f.size(); ++i) dx[i] = 0.5 * (dx[i] + sign * kI * dy[i]);
  return dx;
}

std::vector<cd> d_z(const Grid& g, const std::vector<cd>& f, int a) {
  return d_complex(g, f, a, -1.0);
}

std::vector<cd> d_zbar(const Grid& g, const std::vector<cd>& f, int a) {
  return d_complex(g, f, a, 1.0);
}

RealField ddbar_lambda(const RealField& u, const TorusGeometry& geom) {
  const Grid& g = *u.grid();
  require_same_grid(g, *geom.grid(), "ddbar_lambda");
  const int n = g.complex_dim();
  std::vector<cd> uc(u.data().begin(), u.data().end());
  std::vector<std::vector<cd>> du(n);
  for (int a = 0; a < n; ++a) du[a] = d_z(g, uc, a);
  std::vector<cd> acc(g.size(), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const std::vector<cd> ddu = d_zbar(g, du[a], b);
      for (std::size_t i = 0; i < g.size(); ++i) acc[i] += geom.inverse(i)(b, a) * ddu[i];
    }
  }
  RealField out(u.grid());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = -2.0 * acc[i].real();
  return out;
}

double gauduchon_defect(const TorusGeometry& geom) {
  const int n = geom.complex_dim();
  if (n == 1) return 0.0;
  if (n > 2) throw UnsupportedDimensionError("gauduchon_defect supports n <= 2");
  const Grid& g = *geom.grid();
  // Coefficient of dd^c(omega) relative to the Lebesgue measure, up to a
  // constant: sum eps_{ca} eps_{db} d_c dbar_d g_{ab}.
  std::vector<std::vector<cd>> comp(4, std::vector<cd>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const CMat m = geom.metric(i);
    comp[0][i] = m(0, 0);
    comp[1][i] = m(0, 1);
    comp[2][i] = m(1, 0);
    comp[3][i] = m(1, 1);
  }
  auto ddb = [&](const std::vector<cd>& f, int c, int d) { return d_zbar(g, d_z(g, f, c), d); };
  const auto t1 = ddb(comp[3], 0, 0);  // d1 dbar1 g22
  const auto t2 = ddb(comp[2], 0, 1);  // d1 dbar2 g21
  const auto t3 = ddb(comp[1], 1, 0);  // d2 dbar1 g12
  const auto t4 = ddb(comp[0], 1, 1);  // d2 dbar2 g11
  double m = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    m = std::max(m, std::abs(t1[i] - t2[i] - t3[i] + t4[i]));
  return m;
}

double astheno_defect(const TorusGeometry& geom) {
  if (geom.complex_dim() > 2) throw UnsupportedDimensionError("astheno_defect supports n <= 2");
  return 0.0;
}

}  // namespace twhe
