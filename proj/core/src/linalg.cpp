#include "twhe/linalg.hpp"

#include <cmath>
#include <string>

#include "twhe/errors.hpp"

namespace twhe {

CMat identity(int r) { return CMat::Identity(r, r); }

void hermitian_eigen(const CMat& m, RVec& values, CMat& vectors) {
  const int r = static_cast<int>(m.rows());
  if (r == 1) {
    values.resize(1);
    values(0) = m(0, 0).real();
    vectors = CMat::Identity(1, 1);
    return;
  }
  if (r == 2) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const cd b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    const double mean = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double rad = std::hypot(half, std::abs(b));
    values.resize(2);
    values(0) = mean - rad;
    values(1) = mean + rad;
    vectors.resize(2, 2);
    if (std::abs(b) <= 1e-300 * (1.0 + std::abs(mean))) {
      // already diagonal
      if (a <= d) {
        vectors << 1.0, 0.0, 0.0, 1.0;
      } else {
        vectors << 0.0, 1.0, 1.0, 0.0;
      }
      return;
    }
    // Upper eigenvector from whichever row is better conditioned.
    CVec hi(2);
    if (half >= 0) {
      hi << half + rad, std::conj(b);
    } else {
      hi << b, rad - half;
    }
    hi /= hi.norm();
    vectors(0, 1) = hi(0);
    vectors(1, 1) = hi(1);
    vectors(0, 0) = -std::conj(hi(1));
    vectors(1, 0) = std::conj(hi(0));
    return;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()));
  values = es.eigenvalues();
  vectors = es.eigenvectors();
}

CMat cholesky_lower(const CMat& gram) {
  Eigen::LLT<CMat> llt(0.5 * (gram + gram.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericError("metric is not positive definite");
  return llt.matrixL();
}

double check_positive(const CMat& gram, const char* what) {
  RVec ev;
  CMat vec;
  hermitian_eigen(gram, ev, vec);
  const double top = std::max(1.0, std::abs(ev(ev.size() - 1)));
  if (!(ev(0) > kPositivityFloor * top))
    throw NumericError(std::string(what) + ": smallest eigenvalue " + std::to_string(ev(0)) +
                       " below positivity floor");
  return ev(0);
}

SelfAdjointEigen selfadjoint_eigen(const CMat& s, const CMat& gram) {
  const CMat l = cholesky_lower(gram);
  // M = L^dagger s L^{-dagger} is Hermitian when s is G-self-adjoint.
  const CMat ldag = l.adjoint();
  const CMat m = ldag * s * ldag.inverse();
  RVec values;
  CMat u;
  hermitian_eigen(m, values, u);
  SelfAdjointEigen out;
  out.values = values;
  out.frame = ldag.inverse() * u;
  out.inverse_frame = u.adjoint() * ldag;
  return out;
}

CMat adjoint(const CMat& f, const CMat& gram) { return gram.inverse() * f.adjoint() * gram; }

CMat symmetrize(const CMat& f, const CMat& gram) { return 0.5 * (f + adjoint(f, gram)); }

cd endo_inner(const CMat& f, const CMat& g, const CMat& gram) {
  return (f * adjoint(g, gram)).trace();
}

double endo_norm(const CMat& f, const CMat& gram) {
  return std::sqrt(std::max(0.0, endo_inner(f, f, gram).real()));
}

}  // namespace twhe
