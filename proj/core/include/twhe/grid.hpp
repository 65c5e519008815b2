#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "twhe/conventions.hpp"

namespace twhe {

// Centered first-derivative stencil: (D f)(x) = (1/h) sum_k w_k f(x + k h).
struct Stencil {
  int radius = 1;
  std::vector<int> offsets;
  std::vector<double> weights;

  static Stencil first_derivative(FdOrder order);
  // D e^{i theta k} = (i / h) symbol(theta) e^{i theta k}.
  double symbol(double theta) const;
};

// Uniform periodic grid on a rectangular torus. The lattice is generated by
// periods[2a] along x_a and i*periods[2a+1] along y_a.
class Grid {
 public:
  Grid(int complex_dim, int resolution, std::vector<double> periods = {},
       FdOrder order = kDefaultFdOrder);

  int complex_dim() const { return n_; }
  int real_dim() const { return 2 * n_; }
  int resolution() const { return res_; }
  std::size_t size() const { return size_; }
  double period(int axis) const { return periods_[axis]; }
  double spacing(int axis) const { return periods_[axis] / res_; }
  // Largest spacing; the h in the O(h^2) tolerances.
  double h() const;
  double cell_volume() const;
  FdOrder order() const { return order_; }
  const Stencil& stencil() const { return stencil_; }

  int coord(std::size_t idx, int axis) const {
    return static_cast<int>((idx / stride_[axis]) % res_);
  }
  double coordinate(std::size_t idx, int axis) const { return coord(idx, axis) * spacing(axis); }
  std::size_t stride(int axis) const { return stride_[axis]; }
  std::size_t index(const std::array<int, 4>& c) const;
  std::size_t shift(std::size_t idx, int axis, int step) const {
    const int c = coord(idx, axis);
    int m = (c + step) % res_;
    if (m < 0) m += res_;
    return idx + (static_cast<std::ptrdiff_t>(m) - c) * static_cast<std::ptrdiff_t>(stride_[axis]);
  }

  bool same_shape(const Grid& other) const;

 private:
  int n_;
  int res_;
  std::size_t size_;
  std::array<double, 4> periods_{};
  std::array<std::size_t, 4> stride_{};
  FdOrder order_;
  Stencil stencil_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int complex_dim, int resolution, std::vector<double> periods = {},
                         FdOrder order = kDefaultFdOrder) {
  return std::make_shared<const Grid>(complex_dim, resolution, std::move(periods), order);
}

}  // namespace twhe
