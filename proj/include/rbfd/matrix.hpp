#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rbfd/errors.hpp"

namespace rbfd {

/// Row-major dense matrix of doubles. Values are checked to be finite on
/// construction; mutation through `at`/`data` is the caller's responsibility.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {
    check_dims();
    check_finite();
  }

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    check_dims();
    if (values_.size() != rows_ * cols_)
      throw ShapeError("DenseMatrix: expected " + std::to_string(rows_ * cols_) +
                       " values, got " + std::to_string(values_.size()));
    check_finite();
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

  double& at(std::size_t i, std::size_t j) {
    if (i >= rows_ || j >= cols_) throw std::out_of_range("DenseMatrix::at index out of range");
    return (*this)(i, j);
  }
  double at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw std::out_of_range("DenseMatrix::at index out of range");
    return (*this)(i, j);
  }

  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_symmetric(double tol = 0.0) const noexcept {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

  bool all_finite() const noexcept {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  void check_dims() const {
    if (rows_ == 0 || cols_ == 0) throw ShapeError("DenseMatrix: dimensions must be positive");
  }
  void check_finite() const {
    if (!all_finite()) throw std::invalid_argument("DenseMatrix: non-finite value");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Mean of squared entrywise differences.
inline double mean_squared_difference(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("mean_squared_difference: dimension mismatch");
  double acc = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) {
    const double d = av[k] - bv[k];
    acc += d * d;
  }
  return acc / static_cast<double>(av.size());
}

struct Coord {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// A subset of matrix coordinates. Distinctness is the producer's contract
/// (`sample_minibatch` guarantees it); range is checked against the matrix
/// it is used with.
struct IndexSample {
  std::vector<Coord> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  static IndexSample exhaustive(std::size_t n, std::size_t m) {
    IndexSample s;
    s.pairs.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) s.pairs.push_back({i, j});
    return s;
  }

  void check_range(std::size_t n, std::size_t m) const {
    for (const auto& p : pairs)
      if (p.i >= n || p.j >= m) throw std::out_of_range("IndexSample: coordinate out of range");
  }
};

}  // namespace rbfd
