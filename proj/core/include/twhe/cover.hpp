#pragma once

#include <cstdint>
#include <vector>

#include "twhe/grid.hpp"

namespace twhe {

// Product cover of the torus by overlapping bands. Along each banded real
// axis the circle is split into two arcs, band 0 around [0, 1/2] and band 1
// around [1/2, 1], each extended by `margin()` grid points on both sides, so
// two bands meet in a "mid" seam around 1/2 and a "wrap" seam around 0.
// Charts are tuples of band indices, chart = sum_k band_k 2^k. A cover
// without banded axes has a single chart.
class ChartCover {
 public:
  enum class Seam { kNone, kMid, kWrap };

  ChartCover(GridPtr grid, std::vector<int> banded_axes, double overlap_fraction = kOverlapFraction);

  const GridPtr& grid() const { return grid_; }
  int num_charts() const { return 1 << static_cast<int>(axes_.size()); }
  const std::vector<int>& banded_axes() const { return axes_; }
  int margin() const { return margin_; }

  int band(int chart, int k) const { return (chart >> k) & 1; }
  bool contains(int chart, std::size_t idx) const;
  int chart_of_record(std::size_t idx) const { return cor_[idx]; }

  // Which seam of banded axis k the point lies in (kNone outside both).
  Seam seam(int k, std::size_t idx) const;
  // Grid coordinate along banded axis k lifted into band b, in points.
  int lifted_index(int b, int k, std::size_t idx) const;
  // Real coordinates of the point with banded axes lifted into the chart.
  std::array<double, 4> lifted_coords(int chart, std::size_t idx) const;
  // Real coordinates with every banded axis lifted into band 0.
  std::array<double, 4> band0_coords(std::size_t idx) const { return lifted_coords(0, idx); }

  // True if the box of the given radius (along banded axes) around idx lies
  // in every listed chart.
  bool stencil_inside(const std::vector<int>& charts, std::size_t idx, int radius) const;
  bool stencil_inside(int chart, std::size_t idx, int radius) const;
  std::vector<std::size_t> intersection(const std::vector<int>& charts, int radius = 0) const;

  // Smooth partition of unity subordinate to the cover.
  double partition(int chart, std::size_t idx) const;

  bool same_as(const ChartCover& other) const;

 private:
  bool band_contains(int b, int c) const;
  double band0_weight(int c) const;

  GridPtr grid_;
  std::vector<int> axes_;
  int margin_ = 0;
  std::vector<std::uint8_t> cor_;
};

using CoverPtr = std::shared_ptr<const ChartCover>;

}  // namespace twhe
