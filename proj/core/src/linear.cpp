#include "twhe/linear.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include "twhe/errors.hpp"
#include "twhe/fft.hpp"

namespace twhe {
class MatrixFreeOperator;
}

namespace Eigen::internal {
template <>
struct traits<twhe::MatrixFreeOperator> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace twhe {

class MatrixFreeOperator : public Eigen::EigenBase<MatrixFreeOperator> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  MatrixFreeOperator(const LinearMap& f, Eigen::Index n) : f_(&f), n_(n) {}
  Eigen::Index rows() const { return n_; }
  Eigen::Index cols() const { return n_; }

  template <typename Rhs>
  Eigen::Product<MatrixFreeOperator, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<MatrixFreeOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const { (*f_)(x, y); }

 private:
  const LinearMap* f_;
  Eigen::Index n_;
};

// Eigen calls solve() on the preconditioner; compute() is a no-op because
// the map is bound up front.
class MapPreconditioner {
 public:
  MapPreconditioner() = default;
  void bind(const LinearMap* m) { m_ = m; }
  template <typename M>
  MapPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  MapPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  MapPreconditioner& compute(const M&) { return *this; }
  template <typename Rhs>
  Eigen::VectorXd solve(const Eigen::MatrixBase<Rhs>& b) const {
    Eigen::VectorXd out;
    (*m_)(b, out);
    return out;
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  const LinearMap* m_ = nullptr;
};

}  // namespace twhe

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<twhe::MatrixFreeOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<twhe::MatrixFreeOperator, Rhs,
                                generic_product_impl<twhe::MatrixFreeOperator, Rhs>> {
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const twhe::MatrixFreeOperator& lhs, const Rhs& rhs, const double& alpha) {
    Eigen::VectorXd y;
    lhs.apply(rhs, y);
    dst.noalias() += alpha * y;
  }
};
}  // namespace Eigen::internal

namespace twhe {

KrylovResult gmres_solve(const LinearMap& A, const LinearMap& precond, const Eigen::VectorXd& b,
                         Eigen::VectorXd& x, const KrylovOptions& opt) {
  MatrixFreeOperator op(A, b.size());
  Eigen::GMRES<MatrixFreeOperator, MapPreconditioner> solver;
  solver.preconditioner().bind(&precond);
  solver.compute(op);
  solver.setTolerance(opt.tol);
  solver.setMaxIterations(opt.max_iters);
  solver.set_restart(opt.restart);
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  x = solver.solveWithGuess(b, x);
  KrylovResult out;
  out.iterations = static_cast<int>(solver.iterations());
  out.error = solver.error();
  out.converged = solver.info() == Eigen::Success;
  return out;
}

HelmholtzPreconditioner::HelmholtzPreconditioner(const TorusGeometry& geom, int components, double eps)
    : grid_(geom.grid()), components_(components), inverse_symbol_(geom.grid()->size()) {
  if (!(eps > 0)) throw DomainError("Helmholtz preconditioner needs eps > 0");
  const Grid& g = *grid_;
  // Mean of the metric; for e^{psi} base this is the mean weight times base.
  CMat mean = CMat::Zero(g.complex_dim(), g.complex_dim());
  for (std::size_t i = 0; i < g.size(); ++i) mean += geom.metric(i);
  mean /= static_cast<double>(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) inverse_symbol_[k] = 1.0 / (ddbar_symbol(g, mean, k) + eps);
}

void HelmholtzPreconditioner::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  const Grid& g = *grid_;
  const std::size_t n = g.size();
  out.resize(in.size());
  std::vector<cd> v(n);
  for (int c = 0; c < components_; ++c) {
    for (std::size_t i = 0; i < n; ++i) v[i] = in[i * components_ + c];
    fft_forward(g, v);
    for (std::size_t k = 0; k < n; ++k) v[k] *= inverse_symbol_[k];
    fft_backward(g, v);
    for (std::size_t i = 0; i < n; ++i) out[i * components_ + c] = v[i].real();
  }
}

LinearMap HelmholtzPreconditioner::map() const {
  return [this](const Eigen::VectorXd& in, Eigen::VectorXd& out) { apply(in, out); };
}

}  // namespace twhe
