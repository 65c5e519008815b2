#include "twhe/cover.hpp"

#include <algorithm>
#include <cmath>

#include "twhe/errors.hpp"

namespace twhe {

namespace {

// C-infinity step, 0 at u <= 0 and 1 at u >= 1.
double smooth_step(double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

}  // namespace

ChartCover::ChartCover(GridPtr grid, std::vector<int> banded_axes, double overlap_fraction)
    : grid_(std::move(grid)), axes_(std::move(banded_axes)) {
  const int N = grid_->resolution();
  for (int a : axes_)
    if (a < 0 || a >= grid_->real_dim()) throw ShapeError("banded axis out of range");
  // Composite second-order operators reach twice the stencil radius.
  const int need = 2 * grid_->stencil().radius;
  margin_ = std::max(std::max(need, 2), static_cast<int>(std::lround(overlap_fraction * N)));
  if (!axes_.empty() && 2 * margin_ >= N / 2)
    throw ShapeError("resolution " + std::to_string(N) + " too small for a banded cover");
  cor_.assign(grid_->size(), 0);
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    int c = 0;
    for (std::size_t k = 0; k < axes_.size(); ++k)
      if (grid_->coord(i, axes_[k]) >= N / 2) c |= 1 << k;
    cor_[i] = static_cast<std::uint8_t>(c);
  }
}

bool ChartCover::band_contains(int b, int c) const {
  const int N = grid_->resolution();
  if (b == 0) return c <= N / 2 + margin_ || c >= N - margin_;
  return c >= N / 2 - margin_ || c <= margin_;
}

bool ChartCover::contains(int chart, std::size_t idx) const {
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (!band_contains(band(chart, static_cast<int>(k)), grid_->coord(idx, axes_[k]))) return false;
  return true;
}

ChartCover::Seam ChartCover::seam(int k, std::size_t idx) const {
  const int N = grid_->resolution();
  const int c = grid_->coord(idx, axes_[k]);
  if (std::abs(c - N / 2) <= margin_) return Seam::kMid;
  if (c <= margin_ || c >= N - margin_) return Seam::kWrap;
  return Seam::kNone;
}

int ChartCover::lifted_index(int b, int k, std::size_t idx) const {
  const int N = grid_->resolution();
  const int c = grid_->coord(idx, axes_[k]);
  if (b == 0) return c >= N - margin_ ? c - N : c;
  return c <= margin_ ? c + N : c;
}

std::array<double, 4> ChartCover::lifted_coords(int chart, std::size_t idx) const {
  std::array<double, 4> x{};
  for (int a = 0; a < grid_->real_dim(); ++a) x[a] = grid_->coordinate(idx, a);
  for (std::size_t k = 0; k < axes_.size(); ++k)
    x[axes_[k]] = lifted_index(band(chart, static_cast<int>(k)), static_cast<int>(k), idx) *
                  grid_->spacing(axes_[k]);
  return x;
}

bool ChartCover::stencil_inside(const std::vector<int>& charts, std::size_t idx, int radius) const {
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    for (int m = -radius; m <= radius; ++m) {
      const std::size_t j = grid_->shift(idx, axes_[k], m);
      const int c = grid_->coord(j, axes_[k]);
      for (int ch : charts)
        if (!band_contains(band(ch, static_cast<int>(k)), c)) return false;
    }
  }
  return true;
}

bool ChartCover::stencil_inside(int chart, std::size_t idx, int radius) const {
  const int N = grid_->resolution();
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const int b = band(chart, static_cast<int>(k));
    const int c = grid_->coord(idx, axes_[k]);
    for (int m = -radius; m <= radius; ++m)
      if (!band_contains(b, ((c + m) % N + N) % N)) return false;
  }
  return true;
}

std::vector<std::size_t> ChartCover::intersection(const std::vector<int>& charts, int radius) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid_->size(); ++i)
    if (stencil_inside(charts, i, radius)) out.push_back(i);
  return out;
}

double ChartCover::band0_weight(int c) const {
  const int N = grid_->resolution();
  const double w = margin_;
  const int t = c >= N - margin_ ? c - N : c;  // lift into band 0
  if (t <= margin_) return smooth_step((t + w) / (2 * w));
  if (t >= N / 2 - margin_) return smooth_step((N / 2 + w - t) / (2 * w));
  return 1.0;
}

double ChartCover::partition(int chart, std::size_t idx) const {
  double p = 1.0;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const double w0 = band0_weight(grid_->coord(idx, axes_[k]));
    p *= band(chart, static_cast<int>(k)) == 0 ? w0 : 1.0 - w0;
  }
  return p;
}

bool ChartCover::same_as(const ChartCover& o) const {
  return grid_->same_shape(*o.grid_) && axes_ == o.axes_ && margin_ == o.margin_;
}

}  // namespace twhe
