#pragma once

#include <vector>

#include "twhe/grid.hpp"
#include "twhe/linalg.hpp"

namespace twhe {

// Real function on the grid.
class RealField {
 public:
  RealField() = default;
  explicit RealField(GridPtr grid, double fill = 0.0)
      : grid_(std::move(grid)), data_(grid_->size(), fill) {}

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  double max_abs() const;

 private:
  GridPtr grid_;
  std::vector<double> data_;
};

enum class FormType { k00, k10, k01, k11 };

// Matrix-valued form on the grid: at every point `components()` matrices of
// size rows x cols. Components of (1,0) and (0,1) forms are indexed by a, of
// (1,1)-forms by a * n + b with the coefficient convention in conventions.hpp.
class MatrixField {
 public:
  using Map = Eigen::Map<Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>>;
  using ConstMap = Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>>;

  MatrixField() = default;
  MatrixField(GridPtr grid, FormType type, int rank);

  const GridPtr& grid() const { return grid_; }
  FormType type() const { return type_; }
  int rank() const { return rank_; }
  int components() const { return ncomp_; }
  std::size_t size() const { return grid_ ? grid_->size() : 0; }

  Map at(std::size_t idx, int comp = 0) {
    return Map(&data_[offset(idx, comp)], rank_, rank_);
  }
  ConstMap at(std::size_t idx, int comp = 0) const {
    return ConstMap(&data_[offset(idx, comp)], rank_, rank_);
  }
  CMat get(std::size_t idx, int comp = 0) const { return at(idx, comp); }
  void set(std::size_t idx, int comp, const CMat& m) { at(idx, comp) = m; }

  std::vector<cd>& data() { return data_; }
  const std::vector<cd>& data() const { return data_; }

  // Entrywise sup over all components.
  double max_abs() const;
  MatrixField& operator+=(const MatrixField& o);
  MatrixField& operator-=(const MatrixField& o);
  MatrixField& operator*=(cd c);

 private:
  std::size_t offset(std::size_t idx, int comp) const {
    return (idx * ncomp_ + comp) * static_cast<std::size_t>(rank_ * rank_);
  }
  GridPtr grid_;
  FormType type_ = FormType::k00;
  int rank_ = 0;
  int ncomp_ = 0;
  std::vector<cd> data_;
};

// Typed views. They only fix the form type at construction.
class EndoField : public MatrixField {
 public:
  EndoField() = default;
  EndoField(GridPtr g, int rank) : MatrixField(std::move(g), FormType::k00, rank) {}
};
class EndForm10 : public MatrixField {
 public:
  EndForm10() = default;
  EndForm10(GridPtr g, int rank) : MatrixField(std::move(g), FormType::k10, rank) {}
};
class EndForm01 : public MatrixField {
 public:
  EndForm01() = default;
  EndForm01(GridPtr g, int rank) : MatrixField(std::move(g), FormType::k01, rank) {}
};
class EndForm11 : public MatrixField {
 public:
  EndForm11() = default;
  EndForm11(GridPtr g, int rank) : MatrixField(std::move(g), FormType::k11, rank) {}
};

// Scalar (1,1)-form: an EndForm11 of rank 1.
class Form11Field : public MatrixField {
 public:
  Form11Field() = default;
  explicit Form11Field(GridPtr g) : MatrixField(std::move(g), FormType::k11, 1) {}
  cd coeff(std::size_t idx, int a, int b) const {
    return at(idx, a * grid()->complex_dim() + b)(0, 0);
  }
  void set_coeff(std::size_t idx, int a, int b, cd v) {
    at(idx, a * grid()->complex_dim() + b)(0, 0) = v;
  }
};

// Scalar (1,0)-form.
class Form10Field : public MatrixField {
 public:
  Form10Field() = default;
  explicit Form10Field(GridPtr g) : MatrixField(std::move(g), FormType::k10, 1) {}
  cd coeff(std::size_t idx, int a) const { return at(idx, a)(0, 0); }
  void set_coeff(std::size_t idx, int a, cd v) { at(idx, a)(0, 0) = v; }
};

// Complex scalar function.
class ComplexField : public MatrixField {
 public:
  ComplexField() = default;
  explicit ComplexField(GridPtr g) : MatrixField(std::move(g), FormType::k00, 1) {}
  cd operator[](std::size_t i) const { return data()[i]; }
  cd& operator[](std::size_t i) { return data()[i]; }
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace twhe
