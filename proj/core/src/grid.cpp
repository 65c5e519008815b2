#include "twhe/grid.hpp"

#include <algorithm>
#include <cmath>

#include "twhe/errors.hpp"

namespace twhe {

Stencil Stencil::first_derivative(FdOrder order) {
  Stencil s;
  if (order == FdOrder::kSecond) {
    s.radius = 1;
    s.offsets = {-1, 1};
    s.weights = {-0.5, 0.5};
  } else {
    s.radius = 2;
    s.offsets = {-2, -1, 1, 2};
    s.weights = {1.0 / 12.0, -2.0 / 3.0, 2.0 / 3.0, -1.0 / 12.0};
  }
  return s;
}

double Stencil::symbol(double theta) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < offsets.size(); ++k) acc += weights[k] * std::sin(offsets[k] * theta);
  return acc;
}

Grid::Grid(int complex_dim, int resolution, std::vector<double> periods, FdOrder order)
    : n_(complex_dim), res_(resolution), order_(order), stencil_(Stencil::first_derivative(order)) {
  if (n_ < 1 || n_ > 2) throw UnsupportedDimensionError("complex dimension must be 1 or 2");
  if (res_ < 8) throw ShapeError("grid resolution must be at least 8");
  if (periods.empty()) periods.assign(2 * n_, 1.0);
  if (static_cast<int>(periods.size()) != 2 * n_)
    throw ShapeError("expected one period per real axis");
  size_ = 1;
  for (int a = 0; a < 2 * n_; ++a) {
    if (!(periods[a] > 0)) throw DomainError("lattice periods must be positive");
    periods_[a] = periods[a];
    stride_[a] = size_;
    size_ *= static_cast<std::size_t>(res_);
  }
}

double Grid::h() const {
  double m = 0;
  for (int a = 0; a < real_dim(); ++a) m = std::max(m, spacing(a));
  return m;
}

double Grid::cell_volume() const {
  double v = 1;
  for (int a = 0; a < real_dim(); ++a) v *= spacing(a);
  return v;
}

std::size_t Grid::index(const std::array<int, 4>& c) const {
  std::size_t idx = 0;
  for (int a = 0; a < real_dim(); ++a) {
    int m = c[a] % res_;
    if (m < 0) m += res_;
    idx += static_cast<std::size_t>(m) * stride_[a];
  }
  return idx;
}

bool Grid::same_shape(const Grid& o) const {
  if (n_ != o.n_ || res_ != o.res_ || order_ != o.order_) return false;
  for (int a = 0; a < real_dim(); ++a)
    if (periods_[a] != o.periods_[a]) return false;
  return true;
}

}  // namespace twhe
