#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rbfd/errors.hpp"
#include "rbfd/matrix.hpp"
#include "rbfd/model.hpp"

namespace rbfd {

namespace detail {

inline void check_dims(const DenseMatrix& target, const RbfModel& model) {
  if (target.rows() != model.n() || target.cols() != model.m())
    throw ShapeError("target is " + std::to_string(target.rows()) + "x" +
                     std::to_string(target.cols()) + " but model is " + std::to_string(model.n()) +
                     "x" + std::to_string(model.m()));
}

}  // namespace detail

/// Scratch buffers reused across gradient evaluations of one optimization run.
struct LossWorkspace {
  std::vector<double> kernel;    // per-component kernel values
  std::vector<double> residual;  // prediction - target
};

/// Full-matrix MSE and its gradient in one pass. Residual sign convention is
/// rho = prediction - target. Symmetric models only visit i <= j and fold the
/// (i,j) and (j,i) residuals together, so the kernel is evaluated once per pair.
inline double loss_and_gradient(const DenseMatrix& target, const RbfModel& model, GradientSet& grad,
                                LossWorkspace& ws) {
  detail::check_dims(target, model);
  if (!(grad.shape() == model.shape())) grad = GradientSet(model.shape());
  auto g = grad.flat();
  std::fill(g.begin(), g.end(), 0.0);

  const std::size_t r = model.r(), n = model.n(), m = model.m();
  const double inv_count = 1.0 / static_cast<double>(n * m);
  const auto a = model.a();
  const double b = model.b();
  auto ga = grad.a();

  if (!model.symmetric()) {
    const std::size_t cells = n * m;
    ws.kernel.resize(r * cells);
    ws.residual.assign(cells, b);
    for (std::size_t k = 0; k < r; ++k) {
      const auto u = model.u(k);
      const auto v = model.v(k);
      double* e = ws.kernel.data() + k * cells;
      for (std::size_t i = 0; i < n; ++i) {
        double* pred = ws.residual.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) {
          const double d = u[i] - v[j];
          const double ev = std::exp(-d * d);
          e[i * m + j] = ev;
          pred[j] += a[k] * ev;
        }
      }
    }
    double loss = 0.0, sum_rho = 0.0;
    const auto tv = target.values();
    for (std::size_t c = 0; c < cells; ++c) {
      const double rho = ws.residual[c] - tv[c];
      ws.residual[c] = rho;
      loss += rho * rho;
      sum_rho += rho;
    }
    grad.b() = 2.0 * inv_count * sum_rho;
    for (std::size_t k = 0; k < r; ++k) {
      const auto u = model.u(k);
      const auto v = model.v(k);
      auto du = grad.u(k);
      auto dv = grad.v(k);
      const double* e = ws.kernel.data() + k * cells;
      const double scale = 4.0 * inv_count * a[k];
      double acc_a = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* rho = ws.residual.data() + i * m;
        const double* ei = e + i * m;
        double acc_u = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double re = rho[j] * ei[j];
          const double t = re * (u[i] - v[j]);
          acc_a += re;
          acc_u += t;
          dv[j] += t;
        }
        du[i] = -scale * acc_u;
      }
      for (std::size_t j = 0; j < m; ++j) dv[j] *= scale;
      ga[k] = 2.0 * inv_count * acc_a;
    }
    return loss * inv_count;
  }

  // Symmetric: pairs i < j in row-major order, plus the diagonal where the kernel is 1.
  const std::size_t pairs = n * (n - 1) / 2;
  ws.kernel.resize(r * pairs);
  ws.residual.assign(pairs, b);
  for (std::size_t k = 0; k < r; ++k) {
    const auto u = model.u(k);
    double* e = ws.kernel.data() + k * pairs;
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++p) {
        const double d = u[i] - u[j];
        const double ev = std::exp(-d * d);
        e[p] = ev;
        ws.residual[p] += a[k] * ev;
      }
  }
  double diag_pred = b;
  for (std::size_t k = 0; k < r; ++k) diag_pred += a[k];

  double loss = 0.0, sum_rho = 0.0, sum_diag = 0.0;
  {
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rd = diag_pred - target(i, i);
      loss += rd * rd;
      sum_diag += rd;
      for (std::size_t j = i + 1; j < n; ++j, ++p) {
        const double r_ij = ws.residual[p] - target(i, j);
        const double r_ji = ws.residual[p] - target(j, i);
        loss += r_ij * r_ij + r_ji * r_ji;
        ws.residual[p] = r_ij + r_ji;  // folded residual s_ij
        sum_rho += r_ij + r_ji;
      }
    }
  }
  grad.b() = 2.0 * inv_count * (sum_rho + sum_diag);
  for (std::size_t k = 0; k < r; ++k) {
    const auto u = model.u(k);
    auto du = grad.u(k);
    const double* e = ws.kernel.data() + k * pairs;
    const double scale = 4.0 * inv_count * a[k];
    double acc_a = 0.0;
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc_u = 0.0;
      for (std::size_t j = i + 1; j < n; ++j, ++p) {
        const double se = ws.residual[p] * e[p];
        const double t = se * (u[i] - u[j]);
        acc_a += se;
        acc_u += t;
        du[j] += t;
      }
      du[i] -= acc_u;
    }
    for (std::size_t i = 0; i < n; ++i) du[i] *= scale;
    ga[k] = 2.0 * inv_count * (acc_a + sum_diag);
  }
  return loss * inv_count;
}

/// Subset MSE and gradient; the same formulas as the full version with sums
/// restricted to `sample` and 1/(nm) replaced by 1/|sample|.
inline double loss_and_gradient_subset(const DenseMatrix& target, const RbfModel& model,
                                       const IndexSample& sample, GradientSet& grad,
                                       LossWorkspace& ws) {
  detail::check_dims(target, model);
  if (sample.empty()) throw std::invalid_argument("gradient_subset: empty sample");
  sample.check_range(model.n(), model.m());
  if (!(grad.shape() == model.shape())) grad = GradientSet(model.shape());
  auto g = grad.flat();
  std::fill(g.begin(), g.end(), 0.0);

  const std::size_t r = model.r();
  const auto a = model.a();
  auto ga = grad.a();
  ws.kernel.resize(r);
  double loss = 0.0, sum_rho = 0.0;
  for (const auto& [i, j] : sample.pairs) {
    double pred = model.b();
    for (std::size_t k = 0; k < r; ++k) {
      const double e = rbf_kernel(model.u(k)[i], model.v(k)[j]);
      ws.kernel[k] = e;
      pred += a[k] * e;
    }
    const double rho = pred - target(i, j);
    loss += rho * rho;
    sum_rho += rho;
    for (std::size_t k = 0; k < r; ++k) {
      const double re = rho * ws.kernel[k];
      const double t = 2.0 * a[k] * re * (model.u(k)[i] - model.v(k)[j]);
      ga[k] += re;
      grad.u(k)[i] -= t;
      grad.v(k)[j] += t;  // aliases U for symmetric models: the column role of u
    }
  }
  const double scale = 2.0 / static_cast<double>(sample.size());
  for (double& x : g) x *= scale;
  grad.b() = scale * sum_rho;
  return loss / static_cast<double>(sample.size());
}

/// Mean squared error between the target and the model's reconstruction.
inline double mse_loss(const DenseMatrix& target, const RbfModel& model) {
  detail::check_dims(target, model);
  return mean_squared_difference(target, evaluate_full(model));
}

inline double mse_loss_subset(const DenseMatrix& target, const RbfModel& model,
                              const IndexSample& sample) {
  detail::check_dims(target, model);
  if (sample.empty()) throw std::invalid_argument("mse_loss_subset: empty sample");
  const auto pred = evaluate_entries(model, sample);
  double acc = 0.0;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    const double d = target(sample.pairs[s].i, sample.pairs[s].j) - pred[s];
    acc += d * d;
  }
  return acc / static_cast<double>(sample.size());
}

inline GradientSet gradient(const DenseMatrix& target, const RbfModel& model) {
  GradientSet grad(model.shape());
  LossWorkspace ws;
  loss_and_gradient(target, model, grad, ws);
  return grad;
}

inline GradientSet gradient_subset(const DenseMatrix& target, const RbfModel& model,
                                   const IndexSample& sample) {
  GradientSet grad(model.shape());
  LossWorkspace ws;
  loss_and_gradient_subset(target, model, sample, grad, ws);
  return grad;
}

}  // namespace rbfd
