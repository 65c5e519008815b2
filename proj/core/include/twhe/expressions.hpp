#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "twhe/fields.hpp"

namespace twhe {

// Smooth periodic real function of the torus coordinates, named by a short
// expression string. Grammar: sum of terms separated by '+', each term
// "[coef*]atom", atoms:
//   one, cosx, sinx, cosy, siny, cosxy, sinxy   (first complex coordinate)
//   cosx2, sinx2, cosy2, siny2                   (second complex coordinate)
//   rand<seed>   low-mode trigonometric polynomial with seeded coefficients
// Trigonometric atoms have one period over the torus, e.g. cosx = cos(2 pi x1 / L).
class ScalarExpr {
 public:
  ScalarExpr() = default;
  static ScalarExpr parse(const std::string& text);
  static ScalarExpr random(unsigned seed, int complex_dim, double amplitude = 1.0);

  // coords are the real coordinates divided by their periods, in [0, 1).
  double operator()(const std::array<double, 4>& unit_coords) const;
  RealField sample(const GridPtr& grid) const;
  const std::string& text() const { return text_; }

 private:
  struct Term {
    double coef;
    std::function<double(const std::array<double, 4>&)> fn;
  };
  std::vector<Term> terms_;
  std::string text_;
};

std::array<double, 4> unit_coords(const Grid& g, std::size_t idx);

}  // namespace twhe
