#include "twhe/poisson.hpp"

#include <cmath>
#include <numeric>

#include "twhe/errors.hpp"
#include "twhe/fft.hpp"

namespace twhe {

namespace {

constexpr double kKernelSymbol = 1e-12;

// Applies W0^{-1} on the complement of its kernel; returns the kernel part
// that was dropped (l1 norm over spectral coefficients / size).
double apply_inverse(const Grid& g, const CMat& base, std::vector<cd>& v) {
  fft_forward(g, v);
  double dropped = 0;
  double scale = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = ddbar_symbol(g, base, k);
    scale = std::max(scale, s);
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = ddbar_symbol(g, base, k);
    if (s <= kKernelSymbol * scale) {
      dropped = std::max(dropped, std::abs(v[k]) / static_cast<double>(g.size()));
      v[k] = 0;
    } else {
      v[k] /= s;
    }
  }
  fft_backward(g, v);
  return dropped;
}

void normalize_mean(RealField& phi, const TorusGeometry& geom) {
  const double c = integrate(phi, geom) / geom.volume();
  for (double& v : phi.data()) v -= c;
}

RealField solve_conformal(const RealField& f, const TorusGeometry& geom, const PoissonOptions& opt) {
  const Grid& g = *f.grid();
  std::vector<cd> v(g.size());
  double l1 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    v[i] = geom.conformal_weight(i) * f[i];
    l1 += std::abs(v[i]);
  }
  l1 /= static_cast<double>(g.size());
  const double dropped = apply_inverse(g, geom.base(), v);
  if (dropped > opt.solvability_tol * std::max(l1, 1e-300) && dropped > 1e-300)
    throw SolvabilityError("right-hand side is not orthogonal to the kernel (component " +
                           std::to_string(dropped) + ")");
  RealField phi(f.grid());
  for (std::size_t i = 0; i < g.size(); ++i) phi[i] = v[i].real();
  normalize_mean(phi, geom);
  return phi;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

RealField solve_pointwise(const RealField& f, const TorusGeometry& geom, const PoissonOptions& opt) {
  const GridPtr& gp = f.grid();
  const Grid& g = *gp;
  const std::size_t N = g.size();
  CMat mean = CMat::Zero(g.complex_dim(), g.complex_dim());
  for (std::size_t i = 0; i < N; ++i) mean += geom.metric(i);
  mean /= static_cast<double>(N);

  auto precond = [&](const std::vector<double>& r) {
    std::vector<cd> v(r.begin(), r.end());
    apply_inverse(g, mean, v);
    std::vector<double> out(N);
    for (std::size_t i = 0; i < N; ++i) out[i] = v[i].real();
    return out;
  };
  auto apply = [&](const std::vector<double>& x) {
    RealField xf(gp);
    xf.data() = x;
    return ddbar_lambda(xf, geom).data();
  };

  const std::vector<double>& b = f.data();
  const double bnorm = std::sqrt(dot(b, b));
  std::vector<double> x(N, 0.0), r = b, rhat = b, p(N, 0.0), v(N, 0.0);
  if (bnorm == 0) return RealField(gp);
  double rho = 1, alpha = 1, omega = 1;
  for (int it = 0; it < opt.max_iters; ++it) {
    const double rho_new = dot(rhat, r);
    if (rho_new == 0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    const std::vector<double> phat = precond(p);
    v = apply(phat);
    alpha = rho_new / dot(rhat, v);
    std::vector<double> s(N);
    for (std::size_t i = 0; i < N; ++i) s[i] = r[i] - alpha * v[i];
    const std::vector<double> shat = precond(s);
    const std::vector<double> t = apply(shat);
    const double tt = dot(t, t);
    omega = tt > 0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    rho = rho_new;
    if (std::sqrt(dot(r, r)) <= opt.tol * bnorm) {
      RealField phi(gp);
      phi.data() = x;
      normalize_mean(phi, geom);
      return phi;
    }
    if (omega == 0) break;
  }
  throw IterationLimitError("poisson_solve: BiCGSTAB did not reach the residual target");
}

}  // namespace

RealField poisson_solve(const RealField& f, const TorusGeometry& geom, const PoissonOptions& opt) {
  require_same_grid(*f.grid(), *geom.grid(), "poisson_solve");
  if (geom.conformally_constant()) return solve_conformal(f, geom, opt);
  return solve_pointwise(f, geom, opt);
}

}  // namespace twhe
