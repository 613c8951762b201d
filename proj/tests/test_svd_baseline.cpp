#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "rbfd/datagen.hpp"
#include "rbfd/svd.hpp"

using namespace rbfd;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  return out;
}

DenseMatrix from_eigen(const Eigen::MatrixXd& a) {
  DenseMatrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  return out;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index r, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, r);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < r; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
}

double orthonormality_error(const std::vector<std::vector<double>>& vecs) {
  double worst = 0.0;
  for (std::size_t a = 0; a < vecs.size(); ++a)
    for (std::size_t b = 0; b < vecs.size(); ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < vecs[a].size(); ++i) dot += vecs[a][i] * vecs[b][i];
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

DenseMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
  auto g = gaussian_matrix(n, n, seed);
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = 0.5 * (g(i, j) + g(j, i));
  return out;
}

}  // namespace

TEST(TruncatedSvd, RankOneIsExact) {
  DenseMatrix k(5, 4);
  const double x[] = {1, -2, 0.5, 3, 0.25};
  const double y[] = {2, 1, -1, 0.5};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) k(i, j) = x[i] * y[j];
  const auto approx = truncated_svd(k, 1);
  EXPECT_LT(mean_squared_difference(k, approx.reconstruct()), 1e-20);
}

TEST(TruncatedSvd, IdentityTail) {
  for (std::size_t r = 1; r <= 6; ++r) {
    const auto approx = truncated_svd(DenseMatrix::identity(6), r);
    EXPECT_NEAR(mean_squared_difference(DenseMatrix::identity(6), approx.reconstruct()),
                static_cast<double>(6 - r) / 36.0, 1e-15);
  }
}

TEST(TruncatedSvd, RankRangeErrors) {
  const auto g = gaussian_matrix(4, 3, 1);
  EXPECT_THROW((void)truncated_svd(g, 0), std::invalid_argument);
  EXPECT_THROW((void)truncated_svd(g, 4), std::invalid_argument);
  EXPECT_THROW((void)svd_mse_curve(g, 4), std::invalid_argument);
}

TEST(TruncatedSvd, MatchesEigenOracle) {
  for (auto [n, m] : {std::pair{7, 5}, std::pair{5, 9}, std::pair{12, 12}}) {
    const auto k = gaussian_matrix(n, m, 100 + n * m);
    Eigen::JacobiSVD<Eigen::MatrixXd> oracle(to_eigen(k), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sigma = singular_values(k);
    ASSERT_EQ(sigma.size(), static_cast<std::size_t>(std::min(n, m)));
    for (std::size_t s = 0; s < sigma.size(); ++s)
      EXPECT_NEAR(sigma[s], oracle.singularValues()(s), 1e-10 * oracle.singularValues()(0));

    const std::size_t r = 3;
    const auto approx = truncated_svd(k, r);
    const Eigen::MatrixXd best = oracle.matrixU().leftCols(r) *
                                 oracle.singularValues().head(r).asDiagonal() *
                                 oracle.matrixV().leftCols(r).transpose();
    EXPECT_LT((to_eigen(approx.reconstruct()) - best).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(orthonormality_error(approx.left), 1e-10);
    EXPECT_LT(orthonormality_error(approx.right), 1e-10);
    EXPECT_TRUE(std::is_sorted(approx.values.rbegin(), approx.values.rend()));
  }
}

TEST(TruncatedSvd, CanonicalSignAndParamCount) {
  const auto approx = truncated_svd(gaussian_matrix(6, 4, 3), 3);
  for (const auto& x : approx.left) {
    const auto it = std::max_element(x.begin(), x.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    EXPECT_GE(*it, 0.0);
  }
  EXPECT_EQ(approx.param_count(), 3u * (6 + 4) + 3);
  EXPECT_EQ(approx.vector_param_count(), 30u);
}

TEST(TruncatedSvd, TransposeConsistency) {
  const auto k = gaussian_matrix(9, 6, 4);
  const auto a = singular_values(k);
  const auto b = singular_values(k.transpose());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t s = 0; s < a.size(); ++s) EXPECT_NEAR(a[s], b[s], 1e-12 * a[0]);
}

TEST(SvdMseCurve, FullRankAndIdentity) {
  const auto k = gaussian_matrix(8, 5, 5);
  EXPECT_LT(mean_squared_difference(k, truncated_svd(k, 5).reconstruct()), 1e-18);
  EXPECT_LT(svd_mse_curve(k, 5).back().second, 1e-18);
  const auto curve = svd_mse_curve(DenseMatrix::identity(10), 10);
  for (const auto& [r, mse] : curve) EXPECT_DOUBLE_EQ(mse, static_cast<double>(10 - r) / 100.0);
}

TEST(SvdMseCurve, TailEnergyIdentityAgainstOracle) {
  const auto k = gaussian_matrix(40, 40, 6);
  Eigen::JacobiSVD<Eigen::MatrixXd> oracle(to_eigen(k));
  const auto sv = oracle.singularValues();
  const auto curve = svd_mse_curve(k, 40);
  double prev = INFINITY;
  for (const auto& [r, mse] : curve) {
    double tail = 0.0;
    for (Eigen::Index s = static_cast<Eigen::Index>(r); s < sv.size(); ++s) tail += sv(s) * sv(s);
    EXPECT_NEAR(mse, tail / 1600.0, 1e-10 * std::max(tail / 1600.0, 1e-12));
    EXPECT_LE(mse, prev);
    prev = mse;
    if (r % 7 == 0) {
      const double direct = mean_squared_difference(k, truncated_svd(k, r).reconstruct());
      EXPECT_NEAR(direct, mse, 1e-10 * mse);
    }
  }
}

TEST(SvdBaseline, EckartYoungAgainstRandomCandidates) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto k = gaussian_matrix(8, 6, 200 + trial);
    const Eigen::MatrixXd ke = to_eigen(k);
    for (std::size_t r : {1u, 2u, 4u}) {
      const double best = mean_squared_difference(k, truncated_svd(k, r).reconstruct());
      for (int c = 0; c < 200; ++c) {
        const auto x = random_orthonormal(8, r, rng);
        const auto y = random_orthonormal(6, r, rng);
        Eigen::MatrixXd cand = Eigen::MatrixXd::Zero(8, 6);
        for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(r); ++q) {
          const double s = x.col(q).dot(ke * y.col(q));
          cand += s * x.col(q) * y.col(q).transpose();
        }
        EXPECT_LE(best, mean_squared_difference(k, from_eigen(cand)) + 1e-15);
      }
    }
  }
}

TEST(SymmetricLowrank, DiagonalKeepsLargestMagnitude) {
  DenseMatrix d(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = -2.0;
  d(2, 2) = 1.0;
  const auto approx = symmetric_lowrank(d, 1);
  EXPECT_DOUBLE_EQ(approx.values[0], 3.0);
  EXPECT_NEAR(mean_squared_difference(d, approx.reconstruct()), 5.0 / 9.0, 1e-15);
  const auto two = symmetric_lowrank(d, 2);
  EXPECT_DOUBLE_EQ(two.values[1], -2.0);
  EXPECT_EQ(two.param_count(), 2u * 3 + 2);
}

TEST(SymmetricLowrank, RejectsAsymmetricAndBadRank) {
  auto g = gaussian_matrix(4, 4, 9);
  EXPECT_THROW((void)symmetric_lowrank(g, 2), std::invalid_argument);
  EXPECT_THROW((void)symmetric_lowrank(gaussian_matrix(3, 4, 9), 1), std::invalid_argument);
  const auto s = random_symmetric(4, 9);
  EXPECT_THROW((void)symmetric_lowrank(s, 0), std::invalid_argument);
  EXPECT_THROW((void)symmetric_lowrank(s, 5), std::invalid_argument);
}

TEST(SymmetricLowrank, MatchesEigenOracle) {
  const auto s = random_symmetric(15, 10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(to_eigen(s));
  std::vector<double> lambdas(oracle.eigenvalues().data(), oracle.eigenvalues().data() + 15);
  std::sort(lambdas.begin(), lambdas.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  const auto approx = symmetric_lowrank(s, 15);
  for (std::size_t k = 0; k < 15; ++k) EXPECT_NEAR(approx.values[k], lambdas[k], 1e-10);
  EXPECT_LT(orthonormality_error(approx.left), 1e-10);
  const auto curve = symmetric_mse_curve(s, 15);
  for (const auto& [r, mse] : curve) {
    double tail = 0.0;
    for (std::size_t k = r; k < 15; ++k) tail += lambdas[k] * lambdas[k];
    EXPECT_NEAR(mse, tail / 225.0, 1e-10 * std::max(tail / 225.0, 1e-12));
    EXPECT_NEAR(mean_squared_difference(s, symmetric_lowrank(s, r).reconstruct()), mse, 1e-12);
  }
}

TEST(SymmetricLowrank, SbmExpectationIsRankFive) {
  const std::vector<std::size_t> sizes{8, 12, 16, 20, 24};
  const std::size_t n = 80;
  DenseMatrix p(n, n);
  std::vector<std::size_t> block;
  for (std::size_t b = 0; b < sizes.size(); ++b) block.insert(block.end(), sizes[b], b);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = block[i] == block[j] ? 0.8 : 0.2;
  EXPECT_LT(mean_squared_difference(p, symmetric_lowrank(p, 5).reconstruct()), 1e-20);
}

TEST(SymmetricLowrank, ErdosRenyiMinRankNearFull) {
  const auto adj = erdos_renyi(40, 0.5, 1);
  const auto curve = symmetric_mse_curve(adj, 40);
  const auto rank = min_rank_below(curve, 1e-5);
  ASSERT_TRUE(rank.has_value());
  EXPECT_GE(*rank, 38u);
  EXPECT_LE(*rank, 40u);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(to_eigen(adj));
  std::vector<double> sq;
  for (Eigen::Index k = 0; k < 40; ++k) sq.push_back(oracle.eigenvalues()(k) * oracle.eigenvalues()(k));
  std::sort(sq.begin(), sq.end(), std::greater<>());
  std::size_t expected = 0;
  for (std::size_t r = 1; r <= 40; ++r) {
    double tail = 0.0;
    for (std::size_t k = r; k < 40; ++k) tail += sq[k];
    if (tail / 1600.0 < 1e-5) {
      expected = r;
      break;
    }
  }
  EXPECT_EQ(*rank, expected);
}

TEST(MinRankBelow, StrictThreshold) {
  const std::vector<std::pair<std::size_t, double>> curve{{1, 0.5}, {2, 0.1}, {3, 0.01}};
  EXPECT_EQ(min_rank_below(curve, 0.1), std::optional<std::size_t>{3});
  EXPECT_EQ(min_rank_below(curve, 0.2), std::optional<std::size_t>{2});
  EXPECT_FALSE(min_rank_below(curve, 0.001).has_value());
}
