#include "twhe/spectral.hpp"

#include <cmath>

#include "twhe/errors.hpp"

namespace twhe {

double Kernel::operator()(double x, double y) const {
  if (std::abs(x - y) < kDegenerateGap) return diagonal(0.5 * (x + y));
  return value(x, y);
}

Kernel dexp_kernel() {
  return {[](double x, double y) {
            const double d = y - x;
            return std::expm1(d) / d;
          },
          [](double) { return 1.0; }};
}

CMat psi_apply(const SelfAdjointEigen& es, const CMat& A, const Kernel& psi) {
  CMat ap = es.inverse_frame * A * es.frame;
  const int r = static_cast<int>(A.rows());
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k) {
      if (ap(j, k) == cd(0.0)) continue;
      ap(j, k) *= psi(es.values(j), es.values(k));
    }
  return es.frame * ap * es.inverse_frame;
}

CMat psi_apply(const CMat& s, const CMat& A, const Kernel& psi, const CMat& gram) {
  return psi_apply(selfadjoint_eigen(s, gram), A, psi);
}

CMat spectral_function(const SelfAdjointEigen& es, const std::function<double(double)>& f) {
  const int r = static_cast<int>(es.values.size());
  CMat d = CMat::Zero(r, r);
  for (int j = 0; j < r; ++j) d(j, j) = f(es.values(j));
  return es.frame * d * es.inverse_frame;
}

CMat endo_exp(const CMat& s, const CMat& gram) {
  return spectral_function(selfadjoint_eigen(s, gram), [](double x) { return std::exp(x); });
}

CMat endo_log(const CMat& h, const CMat& gram) {
  const CMat adj = adjoint(h, gram);
  const double scale = std::max(1.0, h.norm());
  if ((adj - h).norm() > 1e-8 * scale) throw DomainError("endo_log: h is not self-adjoint");
  const auto es = selfadjoint_eigen(h, gram);
  const double top = std::max(1.0, std::abs(es.values(es.values.size() - 1)));
  if (!(es.values(0) > kPositivityFloor * top))
    throw NumericError("endo_log: eigenvalue below positivity floor");
  return spectral_function(es, [](double x) { return std::log(x); });
}

EndoField endo_exp(const EndoField& s, const MetricField& K) {
  EndoField out(s.grid(), s.rank());
  for (std::size_t x = 0; x < s.size(); ++x) out.at(x) = endo_exp(s.get(x), K.at(x));
  return out;
}

EndoField endo_log(const EndoField& h, const MetricField& K) {
  EndoField out(h.grid(), h.rank());
  for (std::size_t x = 0; x < h.size(); ++x) out.at(x) = endo_log(h.get(x), K.at(x));
  return out;
}

MatrixField psi_apply(const EndoField& s, const MatrixField& A, const Kernel& psi, const MetricField& K) {
  MatrixField out(A.grid(), A.type(), A.rank());
  for (std::size_t x = 0; x < s.size(); ++x) {
    const auto es = selfadjoint_eigen(s.get(x), K.at(x));
    for (int c = 0; c < A.components(); ++c) out.at(x, c) = psi_apply(es, A.get(x, c), psi);
  }
  return out;
}

}  // namespace twhe
