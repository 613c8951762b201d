#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbfd/errors.hpp"
#include "rbfd/matrix.hpp"

namespace rbfd {

/// Shape of an RBF decomposition: r components over an n x m matrix.
struct ModelShape {
  std::size_t r = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  bool symmetric = false;

  std::size_t u_size() const noexcept { return r * n; }
  std::size_t v_size() const noexcept { return symmetric ? 0 : r * m; }
  /// Parameters subject to the component-vector treatment (U and V).
  std::size_t vector_size() const noexcept { return u_size() + v_size(); }
  std::size_t total_size() const noexcept { return vector_size() + r + 1; }

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Flat parameter storage shared by the model and its gradient.
///
/// Layout: U (r rows of n) | V (r rows of m, omitted when symmetric) | a (r) | b.
/// With `symmetric`, the V accessors alias U.
class ParameterBlock {
 public:
  ParameterBlock() = default;

  explicit ParameterBlock(ModelShape shape) : shape_(shape), theta_(shape.total_size(), 0.0) {
    if (shape.n == 0 || shape.m == 0) throw ShapeError("model dimensions must be positive");
    if (shape.symmetric && shape.n != shape.m)
      throw ShapeError("symmetric model requires n == m");
  }

  const ModelShape& shape() const noexcept { return shape_; }
  std::size_t r() const noexcept { return shape_.r; }
  std::size_t n() const noexcept { return shape_.n; }
  std::size_t m() const noexcept { return shape_.m; }
  bool symmetric() const noexcept { return shape_.symmetric; }

  std::span<double> u(std::size_t k) noexcept { return {theta_.data() + k * shape_.n, shape_.n}; }
  std::span<const double> u(std::size_t k) const noexcept {
    return {theta_.data() + k * shape_.n, shape_.n};
  }
  std::span<double> v(std::size_t k) noexcept {
    if (shape_.symmetric) return u(k);
    return {theta_.data() + shape_.u_size() + k * shape_.m, shape_.m};
  }
  std::span<const double> v(std::size_t k) const noexcept {
    if (shape_.symmetric) return u(k);
    return {theta_.data() + shape_.u_size() + k * shape_.m, shape_.m};
  }
  std::span<double> a() noexcept { return {theta_.data() + shape_.vector_size(), shape_.r}; }
  std::span<const double> a() const noexcept {
    return {theta_.data() + shape_.vector_size(), shape_.r};
  }
  double& b() noexcept { return theta_.back(); }
  double b() const noexcept { return theta_.back(); }

  std::span<double> flat() noexcept { return theta_; }
  std::span<const double> flat() const noexcept { return theta_; }

  bool all_finite() const noexcept {
    for (double x : theta_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  friend bool operator==(const ParameterBlock&, const ParameterBlock&) = default;

 private:
  ModelShape shape_;
  std::vector<double> theta_;
};

/// b + sum_k a_k exp(-(u^(k)_i - v^(k)_j)^2).
class RbfModel : public ParameterBlock {
 public:
  RbfModel() = default;
  RbfModel(std::size_t r, std::size_t n, std::size_t m, bool symmetric)
      : ParameterBlock(ModelShape{r, n, m, symmetric}) {}
  explicit RbfModel(ModelShape shape) : ParameterBlock(shape) {}
};

/// dL/dtheta laid out exactly like the model it was computed for.
class GradientSet : public ParameterBlock {
 public:
  GradientSet() = default;
  explicit GradientSet(ModelShape shape) : ParameterBlock(shape) {}
};

inline double rbf_kernel(double x, double y) noexcept {
  const double d = x - y;
  return std::exp(-d * d);
}

inline double rbf_entry(const RbfModel& model, std::size_t k, std::size_t i, std::size_t j) {
  if (k >= model.r() || i >= model.n() || j >= model.m())
    throw std::out_of_range("rbf_entry: index out of range");
  return rbf_kernel(model.u(k)[i], model.v(k)[j]);
}

inline double model_entry(const RbfModel& model, std::size_t i, std::size_t j) noexcept {
  double acc = model.b();
  const auto a = model.a();
  for (std::size_t k = 0; k < model.r(); ++k) acc += a[k] * rbf_kernel(model.u(k)[i], model.v(k)[j]);
  return acc;
}

/// Dense n x m reconstruction. Symmetric models fill the lower triangle by
/// mirroring, so the result equals its transpose bit for bit.
inline DenseMatrix evaluate_full(const RbfModel& model) {
  const std::size_t n = model.n(), m = model.m();
  std::vector<double> out(n * m, model.b());
  const auto a = model.a();
  for (std::size_t k = 0; k < model.r(); ++k) {
    const auto u = model.u(k);
    const auto v = model.v(k);
    for (std::size_t i = 0; i < n; ++i) {
      double* row = out.data() + i * m;
      const std::size_t j0 = model.symmetric() ? i : 0;
      for (std::size_t j = j0; j < m; ++j) row[j] += a[k] * rbf_kernel(u[i], v[j]);
    }
  }
  if (model.symmetric())
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) out[i * m + j] = out[j * m + i];
  return DenseMatrix(n, m, std::move(out));
}

inline std::vector<double> evaluate_entries(const RbfModel& model, const IndexSample& sample) {
  sample.check_range(model.n(), model.m());
  std::vector<double> out;
  out.reserve(sample.size());
  for (const auto& p : sample.pairs) {
    // Canonical (min, max) order keeps symmetric models bit-identical to evaluate_full.
    const auto [i, j] = (model.symmetric() && p.i > p.j) ? Coord{p.j, p.i} : p;
    out.push_back(model_entry(model, i, j));
  }
  return out;
}

/// Full learnable count: vectors + coefficients + offset.
inline std::size_t param_count(const RbfModel& model) noexcept { return model.shape().total_size(); }

/// Component-vector entries only (U and, if asymmetric, V).
inline std::size_t vector_param_count(const RbfModel& model) noexcept {
  return model.shape().vector_size();
}

}  // namespace rbfd
