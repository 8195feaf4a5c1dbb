#ifndef APD_LINALG_HPP
#define APD_LINALG_HPP

// Dense Gaussian elimination over an exact field (Rational or ExactScalar).
// Matrices here are coboundary maps of small graphs and substitution
// matrices, so dense storage is fine.

#include <cstddef>
#include <optional>
#include <vector>

#include "apd/exactnum.hpp"

namespace apd {

inline bool is_zero_value(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero_value(const ExactScalar& x) { return x.is_zero(); }

template <class F>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, F(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  F& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const F& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<F> apply(const std::vector<F>& x) const {
    std::vector<F> y(rows_, F(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!is_zero_value((*this)(i, j))) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  /// In-place reduced row echelon form; returns pivot columns.
  std::vector<std::size_t> reduce() {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
      std::size_t piv = row;
      while (piv < rows_ && is_zero_value((*this)(piv, col))) ++piv;
      if (piv == rows_) continue;
      swap_rows(piv, row);
      const F inv = F(1) / (*this)(row, col);
      for (std::size_t j = col; j < cols_; ++j) (*this)(row, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == row || is_zero_value((*this)(i, col))) continue;
        const F factor = (*this)(i, col);
        for (std::size_t j = col; j < cols_; ++j) {
          if (!is_zero_value((*this)(row, j))) (*this)(i, j) -= factor * (*this)(row, j);
        }
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  std::size_t rank() const {
    Matrix m = *this;
    return m.reduce().size();
  }

  /// Basis of {x : A x = 0}.
  std::vector<std::vector<F>> nullspace() const {
    Matrix m = *this;
    const auto pivots = m.reduce();
    std::vector<bool> is_pivot(cols_, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<F>> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
      if (is_pivot[free]) continue;
      std::vector<F> v(cols_, F(0));
      v[free] = F(1);
      for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  /// Some solution of A x = b, or nullopt when b is not in the column space.
  std::optional<std::vector<F>> solve(const std::vector<F>& b) const {
    Matrix aug(rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_) = b[i];
    }
    const auto pivots = aug.reduce();
    if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
    std::vector<F> x(cols_, F(0));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, cols_);
    return x;
  }

 private:
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<F> data_;
};

}  // namespace apd

#endif  // APD_LINALG_HPP
