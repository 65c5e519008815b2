#include "twhe/fields.hpp"

#include <cmath>
#include <string>

#include "twhe/errors.hpp"

namespace twhe {

double RealField::max_abs() const {
  double m = 0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

MatrixField::MatrixField(GridPtr grid, FormType type, int rank)
    : grid_(std::move(grid)), type_(type), rank_(rank) {
  if (rank_ < 1 || rank_ > kMaxRank) throw ShapeError("rank out of range");
  const int n = grid_->complex_dim();
  switch (type_) {
    case FormType::k00: ncomp_ = 1; break;
    case FormType::k10:
    case FormType::k01: ncomp_ = n; break;
    case FormType::k11: ncomp_ = n * n; break;
  }
  data_.assign(grid_->size() * ncomp_ * rank_ * rank_, cd(0.0));
}

double MatrixField::max_abs() const {
  double m = 0;
  for (const cd& v : data_) m = std::max(m, std::abs(v));
  return m;
}

static void check_compatible(const MatrixField& a, const MatrixField& b) {
  if (a.type() != b.type() || a.rank() != b.rank() || a.data().size() != b.data().size())
    throw ShapeError("incompatible fields");
}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  check_compatible(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

MatrixField& MatrixField::operator-=(const MatrixField& o) {
  check_compatible(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

MatrixField& MatrixField::operator*=(cd c) {
  for (cd& v : data_) v *= c;
  return *this;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": grids differ");
}

}  // namespace twhe
