#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbfd/errors.hpp"
#include "rbfd/matrix.hpp"

namespace rbfd {

/// Truncated decomposition sum_k value_k * left_k * right_k^T.
///
/// General variant: `values` are singular values, nonincreasing.
/// Symmetric variant: `values` are signed eigenvalues ordered by |value|
/// nonincreasing, and `right` equals `left`.
struct SvdApprox {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool symmetric = false;
  std::vector<double> values;
  std::vector<std::vector<double>> left;
  std::vector<std::vector<double>> right;

  std::size_t rank() const noexcept { return values.size(); }

  DenseMatrix reconstruct() const {
    DenseMatrix out(rows, cols);
    for (std::size_t k = 0; k < rank(); ++k)
      for (std::size_t i = 0; i < rows; ++i) {
        const double li = values[k] * left[k][i];
        for (std::size_t j = 0; j < cols; ++j) out(i, j) += li * right[k][j];
      }
    return out;
  }

  /// Vectors plus scales: rank (n + m + 1) in general, rank (n + 1) symmetric.
  std::size_t param_count() const noexcept { return vector_param_count() + rank(); }
  std::size_t vector_param_count() const noexcept {
    return symmetric ? rank() * rows : rank() * (rows + cols);
  }
};

namespace detail {

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

/// Flips (left, right) so the largest-magnitude entry of `left` is nonnegative.
inline void canonical_sign(std::vector<double>& left, std::vector<double>& right) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < left.size(); ++i)
    if (std::abs(left[i]) > std::abs(left[arg])) arg = i;
  if (left[arg] < 0.0) {
    for (double& x : left) x = -x;
    if (&left != &right)
      for (double& x : right) x = -x;
  }
}

/// Extends `basis` (orthonormal vectors of length dim) with unit vectors
/// orthogonal to all previous ones until it holds `count` vectors.
inline void complete_orthonormal(std::vector<std::vector<double>>& basis, std::size_t count,
                                 std::size_t dim) {
  for (std::size_t e = 0; basis.size() < count && e < dim; ++e) {
    std::vector<double> cand(dim, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) {
        const double c = dot(cand, q);
        for (std::size_t i = 0; i < dim; ++i) cand[i] -= c * q[i];
      }
    const double norm = std::sqrt(dot(cand, cand));
    if (norm < 1e-6) continue;
    for (double& x : cand) x /= norm;
    basis.push_back(std::move(cand));
  }
}

struct FullSvd {
  std::vector<double> sigma;              // nonincreasing, length min(n, m)
  std::vector<std::vector<double>> left;  // length-n vectors
  std::vector<std::vector<double>> right; // length-m vectors
};

/// One-sided (Hestenes) Jacobi SVD of a tall matrix given as columns.
inline FullSvd jacobi_svd_tall(std::vector<std::vector<double>> cols, std::size_t n) {
  const std::size_t m = cols.size();
  std::vector<std::vector<double>> v(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) v[j][j] = 1.0;

  constexpr double kTol = 1e-15;
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) {
        auto& wp = cols[p];
        auto& wq = cols[q];
        const double alpha = dot(wp, wp);
        const double beta = dot(wq, wq);
        const double gamma = dot(wp, wq);
        if (gamma == 0.0 || std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double a = wp[i], b = wq[i];
          wp[i] = c * a - s * b;
          wq[i] = s * a + c * b;
        }
        auto& vp = v[p];
        auto& vq = v[q];
        for (std::size_t i = 0; i < m; ++i) {
          const double a = vp[i], b = vq[i];
          vp[i] = c * a - s * b;
          vq[i] = s * a + c * b;
        }
      }
    if (!rotated) break;
  }

  std::vector<double> norms(m);
  for (std::size_t j = 0; j < m; ++j) norms[j] = std::sqrt(dot(cols[j], cols[j]));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  FullSvd out;
  const double cutoff = (m > 0 ? norms[order[0]] : 0.0) * 1e-13;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = order[k];
    out.sigma.push_back(norms[j]);
    out.right.push_back(std::move(v[j]));
    // Sorted, so once a column is numerically null every later one is too;
    // those left vectors are completed to an orthonormal set below.
    if (norms[j] > cutoff && norms[j] > 0.0 && out.left.size() == k) {
      std::vector<double> u(std::move(cols[j]));
      for (double& x : u) x /= norms[j];
      out.left.push_back(std::move(u));
    }
  }
  complete_orthonormal(out.left, m, n);
  return out;
}

inline FullSvd full_svd(const DenseMatrix& a) {
  const std::size_t n = a.rows(), m = a.cols();
  if (n >= m) {
    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) cols[j][i] = a(i, j);
    return jacobi_svd_tall(std::move(cols), n);
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) rows[i][j] = a(i, j);
  auto t = jacobi_svd_tall(std::move(rows), m);
  std::swap(t.left, t.right);
  return t;
}

struct SymmetricEigen {
  std::vector<double> values;               // ordered by |value| nonincreasing
  std::vector<std::vector<double>> vectors; // orthonormal eigenvectors
};

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
inline SymmetricEigen jacobi_eigen(const DenseMatrix& sym) {
  const std::size_t n = sym.rows();
  std::vector<double> a(sym.values().begin(), sym.values().end());
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double total = 0.0;
  for (double x : a) total += x * x;
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off <= 1e-32 * total || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p), aqq = at(q, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t =
            std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = at(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(at(x, x)) > std::abs(at(y, y));
  });
  SymmetricEigen out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.values.push_back(at(j, j));
    std::vector<double> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v[i * n + j];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

inline void check_symmetric(const DenseMatrix& a, double tol) {
  if (!a.square()) throw std::invalid_argument("symmetric_lowrank: matrix must be square");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(a(j, i))});
      if (std::abs(a(i, j) - a(j, i)) > tol * scale)
        throw std::invalid_argument("symmetric_lowrank: matrix is not symmetric");
    }
}

inline std::vector<std::pair<std::size_t, double>> tail_curve(const std::vector<double>& values,
                                                              std::size_t max_rank,
                                                              double cells) {
  std::vector<double> tail(values.size() + 1, 0.0);
  for (std::size_t k = values.size(); k-- > 0;) tail[k] = tail[k + 1] + values[k] * values[k];
  std::vector<std::pair<std::size_t, double>> curve;
  for (std::size_t r = 1; r <= max_rank; ++r) curve.emplace_back(r, tail[r] / cells);
  return curve;
}

}  // namespace detail

/// Best rank-`rank` approximation (Eckart-Young) via one-sided Jacobi SVD.
inline SvdApprox truncated_svd(const DenseMatrix& target, std::size_t rank) {
  const std::size_t n = target.rows(), m = target.cols();
  if (rank < 1 || rank > std::min(n, m))
    throw std::invalid_argument("truncated_svd: rank must be in [1, min(n, m)]");
  auto full = detail::full_svd(target);
  SvdApprox out{n, m, false, {}, {}, {}};
  for (std::size_t k = 0; k < rank; ++k) {
    out.values.push_back(full.sigma[k]);
    out.left.push_back(std::move(full.left[k]));
    out.right.push_back(std::move(full.right[k]));
    detail::canonical_sign(out.left.back(), out.right.back());
  }
  return out;
}

/// All singular values, nonincreasing.
inline std::vector<double> singular_values(const DenseMatrix& target) {
  return detail::full_svd(target).sigma;
}

/// (rank, best rank-r MSE) for r = 1..max_rank, from tail energies.
inline std::vector<std::pair<std::size_t, double>> svd_mse_curve(const DenseMatrix& target,
                                                                 std::size_t max_rank) {
  if (max_rank < 1 || max_rank > std::min(target.rows(), target.cols()))
    throw std::invalid_argument("svd_mse_curve: max_rank must be in [1, min(n, m)]");
  return detail::tail_curve(singular_values(target), max_rank,
                            static_cast<double>(target.size()));
}

/// Best rank-`rank` approximation of a symmetric matrix from the eigenpairs of
/// largest |lambda|.
inline SvdApprox symmetric_lowrank(const DenseMatrix& target, std::size_t rank,
                                   double symmetry_tol = 1e-12) {
  detail::check_symmetric(target, symmetry_tol);
  const std::size_t n = target.rows();
  if (rank < 1 || rank > n) throw std::invalid_argument("symmetric_lowrank: rank must be in [1, n]");
  auto eig = detail::jacobi_eigen(target);
  SvdApprox out{n, n, true, {}, {}, {}};
  for (std::size_t k = 0; k < rank; ++k) {
    out.values.push_back(eig.values[k]);
    out.left.push_back(std::move(eig.vectors[k]));
    detail::canonical_sign(out.left.back(), out.left.back());
    out.right.push_back(out.left.back());
  }
  return out;
}

/// Eigenvalue tail curve for symmetric targets: sum_{k>r} lambda_k^2 / n^2.
inline std::vector<std::pair<std::size_t, double>> symmetric_mse_curve(const DenseMatrix& target,
                                                                       std::size_t max_rank,
                                                                       double symmetry_tol = 1e-12) {
  detail::check_symmetric(target, symmetry_tol);
  if (max_rank < 1 || max_rank > target.rows())
    throw std::invalid_argument("symmetric_mse_curve: max_rank must be in [1, n]");
  return detail::tail_curve(detail::jacobi_eigen(target).values, max_rank,
                            static_cast<double>(target.size()));
}

/// Smallest rank whose MSE is strictly below `threshold`, if any.
inline std::optional<std::size_t> min_rank_below(
    const std::vector<std::pair<std::size_t, double>>& curve, double threshold) {
  for (const auto& [rank, mse] : curve)
    if (mse < threshold) return rank;
  return std::nullopt;
}

}  // namespace rbfd
