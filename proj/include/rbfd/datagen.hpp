#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbfd/errors.hpp"
#include "rbfd/matrix.hpp"
#include "rbfd/random.hpp"

namespace rbfd {

/// Points in R^d with optional per-point ground-truth labels.
struct PointCloud {
  std::size_t dim = 0;
  std::vector<std::vector<double>> points;
  std::vector<double> labels;  // empty, or one per point

  std::size_t size() const noexcept { return points.size(); }
  bool has_labels() const noexcept { return !labels.empty(); }

  void validate() const {
    for (const auto& p : points) {
      if (p.size() != dim) throw ShapeError("PointCloud: point dimension mismatch");
      for (double x : p)
        if (!std::isfinite(x)) throw std::invalid_argument("PointCloud: non-finite coordinate");
    }
    if (has_labels() && labels.size() != points.size())
      throw ShapeError("PointCloud: label count does not match point count");
  }
};

inline DenseMatrix gaussian_matrix(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng = make_rng(seed, streams::kMatrix);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(n * m);
  for (double& x : values) x = normal(rng);
  return DenseMatrix(n, m, std::move(values));
}

namespace detail {

/// Half-sample symmetric reflection: (d c b a | a b c d | d c b a).
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t k = i % period;
  if (k < 0) k += period;
  return static_cast<std::size_t>(k < static_cast<std::ptrdiff_t>(n) ? k : period - 1 - k);
}

}  // namespace detail

/// Normalized Gaussian filter of standard deviation `sigma`, truncated at
/// radius ceil(4 sigma), applied with reflect padding.
inline std::vector<double> gaussian_filter_1d(const std::vector<double>& input, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_filter_1d: sigma must be > 0");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> weights(2 * radius + 1);
  for (std::ptrdiff_t t = -radius; t <= radius; ++t)
    weights[t + radius] = std::exp(-0.5 * static_cast<double>(t * t) / (sigma * sigma));
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;

  const std::size_t n = input.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t t = -radius; t <= radius; ++t)
      acc += weights[t + radius] *
             input[detail::reflect_index(static_cast<std::ptrdiff_t>(i) + t, n)];
    out[i] = acc;
  }
  return out;
}

/// iid standard normals passed through `gaussian_filter_1d`.
inline std::vector<double> smoothed_gaussian_vector(std::size_t n, double sigma, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> raw(n);
  for (double& x : raw) x = normal(rng);
  return gaussian_filter_1d(raw, sigma);
}

inline std::vector<double> smoothed_gaussian_vector(std::size_t n, double sigma,
                                                    std::uint64_t seed) {
  Rng rng = make_rng(seed, streams::kMatrix);
  return smoothed_gaussian_vector(n, sigma, rng);
}

/// Symmetric RBF component matrix exp(-(u_i - u_j)^2).
inline DenseMatrix symmetric_rbf_component(const std::vector<double>& u) {
  const std::size_t n = u.size();
  DenseMatrix k(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = u[i] - u[j];
      k(i, j) = k(j, i) = std::exp(-d * d);
    }
  return k;
}

struct KExact2 {
  DenseMatrix matrix;
  std::vector<double> u1;  // smoothed with sigma 3
  std::vector<double> u2;  // smoothed with sigma 6
};

/// 5 K(u1) - 4 K(u2) with smoothed Gaussian component vectors.
inline KExact2 k_exact2(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("k_exact2: n must be >= 2");
  Rng r1 = make_rng(seed, streams::kComponent1);
  Rng r2 = make_rng(seed, streams::kComponent2);
  KExact2 out{DenseMatrix(n, n), smoothed_gaussian_vector(n, 3.0, r1),
              smoothed_gaussian_vector(n, 6.0, r2)};
  const auto k1 = symmetric_rbf_component(out.u1);
  const auto k2 = symmetric_rbf_component(out.u2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.matrix(i, j) = 5.0 * k1(i, j) - 4.0 * k2(i, j);
  return out;
}

enum class GraphFamily { ErdosRenyi, BarabasiAlbert, StochasticBlock };

struct GraphSpec {
  std::size_t n_vertices = 0;
  GraphFamily family = GraphFamily::ErdosRenyi;
  double p = 0.5;                        // Erdos-Renyi
  std::size_t m_attach = 3;              // Barabasi-Albert
  std::vector<std::size_t> block_sizes;  // SBM, ordered
  double p_in = 0.8;
  double p_out = 0.2;
  std::uint64_t seed = 0;

  void validate() const {
    auto prob_ok = [](double q) { return q >= 0.0 && q <= 1.0; };
    switch (family) {
      case GraphFamily::ErdosRenyi:
        if (!prob_ok(p)) throw std::invalid_argument("erdos_renyi: p must be in [0, 1]");
        if (n_vertices < 1) throw std::invalid_argument("erdos_renyi: n must be >= 1");
        break;
      case GraphFamily::BarabasiAlbert:
        if (m_attach < 1 || m_attach >= n_vertices)
          throw std::invalid_argument("barabasi_albert: need 1 <= m_attach < n");
        break;
      case GraphFamily::StochasticBlock: {
        if (!prob_ok(p_in) || !prob_ok(p_out))
          throw std::invalid_argument("sbm: probabilities must be in [0, 1]");
        if (block_sizes.empty()) throw std::invalid_argument("sbm: no blocks");
        std::size_t total = 0;
        for (auto s : block_sizes) {
          if (s == 0) throw std::invalid_argument("sbm: empty block");
          total += s;
        }
        if (total != n_vertices) throw std::invalid_argument("sbm: block sizes must sum to n");
        break;
      }
    }
  }
};

inline DenseMatrix erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  GraphSpec spec;
  spec.n_vertices = n;
  spec.family = GraphFamily::ErdosRenyi;
  spec.p = p;
  spec.validate();
  Rng rng = make_rng(seed, streams::kGraph);
  std::bernoulli_distribution coin(p);
  DenseMatrix adj(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) adj(i, j) = adj(j, i) = 1.0;
  return adj;
}

/// Preferential attachment grown from an m_attach-vertex clique. Each new
/// vertex links to m_attach distinct existing vertices drawn proportionally to
/// degree without replacement.
inline DenseMatrix barabasi_albert(std::size_t n, std::size_t m_attach, std::uint64_t seed) {
  GraphSpec spec;
  spec.n_vertices = n;
  spec.family = GraphFamily::BarabasiAlbert;
  spec.m_attach = m_attach;
  spec.validate();
  Rng rng = make_rng(seed, streams::kGraph);
  DenseMatrix adj(n, n);
  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < m_attach; ++i)
    for (std::size_t j = i + 1; j < m_attach; ++j) {
      adj(i, j) = adj(j, i) = 1.0;
      degree[i] += 1.0;
      degree[j] += 1.0;
    }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t v = m_attach; v < n; ++v) {
    std::vector<double> weight(degree.begin(), degree.begin() + static_cast<std::ptrdiff_t>(v));
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < m_attach; ++c) {
      double total = std::accumulate(weight.begin(), weight.end(), 0.0);
      if (total <= 0.0) {
        // No degree mass left (e.g. a single-vertex seed): fall back to uniform.
        for (std::size_t t = 0; t < v; ++t)
          weight[t] = std::find(chosen.begin(), chosen.end(), t) == chosen.end() ? 1.0 : 0.0;
        total = std::accumulate(weight.begin(), weight.end(), 0.0);
      }
      const double x = unif(rng) * total;
      double run = 0.0;
      std::size_t pick = v;
      for (std::size_t t = 0; t < v; ++t) {
        if (weight[t] <= 0.0) continue;
        pick = t;
        run += weight[t];
        if (x < run) break;
      }
      chosen.push_back(pick);
      weight[pick] = 0.0;
    }
    for (auto t : chosen) {
      adj(v, t) = adj(t, v) = 1.0;
      degree[t] += 1.0;
      degree[v] += 1.0;
    }
  }
  return adj;
}

/// Stochastic block model; vertices are ordered block by block.
inline DenseMatrix sbm(const std::vector<std::size_t>& sizes, double p_in, double p_out,
                       std::uint64_t seed) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  GraphSpec{.n_vertices = n,
            .family = GraphFamily::StochasticBlock,
            .block_sizes = sizes,
            .p_in = p_in,
            .p_out = p_out}
      .validate();
  std::vector<std::size_t> block(n);
  for (std::size_t b = 0, v = 0; b < sizes.size(); ++b)
    for (std::size_t c = 0; c < sizes[b]; ++c) block[v++] = b;
  Rng rng = make_rng(seed, streams::kGraph);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DenseMatrix adj(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double q = block[i] == block[j] ? p_in : p_out;
      if (unif(rng) < q) adj(i, j) = adj(j, i) = 1.0;
    }
  return adj;
}

/// Ground-truth block label of every vertex for `sbm(sizes, ...)`.
inline std::vector<int> sbm_labels(const std::vector<std::size_t>& sizes) {
  std::vector<int> labels;
  for (std::size_t b = 0; b < sizes.size(); ++b)
    labels.insert(labels.end(), sizes[b], static_cast<int>(b));
  return labels;
}

inline DenseMatrix generate_graph(const GraphSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case GraphFamily::ErdosRenyi: return erdos_renyi(spec.n_vertices, spec.p, spec.seed);
    case GraphFamily::BarabasiAlbert:
      return barabasi_albert(spec.n_vertices, spec.m_attach, spec.seed);
    case GraphFamily::StochasticBlock:
      return sbm(spec.block_sizes, spec.p_in, spec.p_out, spec.seed);
  }
  throw std::logic_error("unreachable");
}

/// Noiseless S-surface point for curve parameter t and width parameter y.
inline std::vector<double> s_surface_point(double t, double y) {
  const double sgn = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
  return {std::sin(t), 2.0 * y, sgn * (std::cos(t) - 1.0)};
}

/// S-shaped surface sample: t ~ U[-3pi/2, 3pi/2], y ~ U[0, 2], plus
/// per-coordinate Gaussian noise of standard deviation `noise_delta`.
/// Labels are the t values. Surface and noise use separate streams, so the
/// noiseless cloud for the same seed is the exact pre-noise position.
inline PointCloud s_curve(std::size_t n_points, double noise_delta, std::uint64_t seed) {
  if (n_points < 1) throw std::invalid_argument("s_curve: n_points must be >= 1");
  if (!(noise_delta >= 0.0)) throw std::invalid_argument("s_curve: noise_delta must be >= 0");
  Rng surface = make_rng(seed, streams::kSurface);
  Rng noise = make_rng(seed, streams::kNoise);
  constexpr double half_span = 1.5 * std::numbers::pi;
  std::uniform_real_distribution<double> t_dist(-half_span, half_span);
  std::uniform_real_distribution<double> y_dist(0.0, 2.0);
  std::normal_distribution<double> z(0.0, 1.0);

  PointCloud cloud;
  cloud.dim = 3;
  cloud.points.reserve(n_points);
  cloud.labels.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double t = t_dist(surface);
    const double y = y_dist(surface);
    auto p = s_surface_point(t, y);
    for (double& c : p) c += noise_delta * z(noise);
    cloud.points.push_back(std::move(p));
    cloud.labels.push_back(t);
  }
  return cloud;
}

/// exp(-||x_i - x_j||^2 / 2).
inline DenseMatrix soft_distance_matrix(const PointCloud& cloud) {
  if (cloud.size() == 0) throw std::invalid_argument("soft_distance_matrix: empty cloud");
  cloud.validate();
  const std::size_t n = cloud.size();
  DenseMatrix k(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < cloud.dim; ++c) {
        const double d = cloud.points[i][c] - cloud.points[j][c];
        d2 += d * d;
      }
      k(i, j) = k(j, i) = std::exp(-0.5 * d2);
    }
  return k;
}

/// Feature-space distances d_ij = sqrt(max(0, g_ii + g_jj - 2 g_ij)).
inline DenseMatrix distance_from_gram(const DenseMatrix& gram, double symmetry_tol = 1e-12) {
  if (!gram.square()) throw ShapeError("distance_from_gram: Gram matrix must be square");
  const std::size_t n = gram.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = std::max({1.0, std::abs(gram(i, j)), std::abs(gram(j, i))});
      if (std::abs(gram(i, j) - gram(j, i)) > symmetry_tol * scale)
        throw std::invalid_argument("distance_from_gram: Gram matrix is not symmetric");
    }
  for (std::size_t i = 0; i < n; ++i)
    if (gram(i, i) < 0.0) throw std::invalid_argument("distance_from_gram: negative diagonal");
  DenseMatrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = std::sqrt(std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j)));
  return d;
}

/// Isotropic Gaussian-kernel Gram matrix exp(-||x_i - x_j||^2 / (2 h^2)) of a
/// random point cloud; stand-in input for `distance_from_gram`.
inline DenseMatrix synthetic_gram(std::size_t n, std::size_t dim, double length_scale,
                                  std::uint64_t seed) {
  Rng rng = make_rng(seed, streams::kMatrix);
  std::normal_distribution<double> normal(0.0, 1.0);
  PointCloud cloud;
  cloud.dim = dim;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> p(dim);
    for (double& x : p) x = normal(rng) / length_scale;
    cloud.points.push_back(std::move(p));
  }
  return soft_distance_matrix(cloud);
}

}  // namespace rbfd
