#include <cmath>

#include <gtest/gtest.h>

#include "sgdg/quadrature.hpp"
#include "sgdg/sgdg.hpp"
#include "support.hpp"

using namespace sgdg;

namespace {

SgdgParams skewed_pair(double alpha) {
  SgdgParams p{Vector::Zero(2), CholFactor::identity(2), Vector::Constant(2, alpha),
               Graph::chain(2)};
  p.factor.L(0, 1) = -0.5;
  return p;
}

SgdgParams chain_three(double alpha) {
  SgdgParams p{Vector{{1.0, -0.5, 2.0}}, CholFactor::identity(3),
               Vector::Constant(3, alpha), Graph::chain(3)};
  p.factor.L(0, 1) = -0.5;
  p.factor.L(1, 2) = 0.4;
  p.factor.D << 1.0, 2.0, 0.5;
  return p;
}

ReparamParams case_c() {
  ReparamParams r{Vector::Constant(3, 5.0), Vector{{3.0, -2.0, -4.0}}, Vector::Ones(3),
                  Matrix::Identity(3, 3)};
  r.L(0, 1) = -0.5;
  r.L(1, 2) = 0.5;
  return r;
}

Matrix sample_covariance(const Matrix& x) {
  const Vector m = x.colwise().mean();
  const Matrix c = x.rowwise() - m.transpose();
  return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST(SgdgLogDensity, AlphaZeroIsGaussian) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Graph g = test::random_ordered_decomposable(1 + t % 6, rng);
    SgdgParams p = test::random_sgdg(g, rng);
    p.alpha.setZero();
    const Vector x = Vector::NullaryExpr(g.size(), [&] { return 2 * rng.normal(); });
    ASSERT_NEAR(sgdg_log_density(p, x),
                test::mvn_logpdf_oracle(x, p.mu, assemble_precision(p.factor)), 1e-10);
  }
}

TEST(SgdgLogDensity, IntegratesToOneInTwoDimensions) {
  const auto q = composite_gauss_legendre(40, 12, -10.0, 10.0);
  for (double alpha : {2.0, 4.0}) {
    const SgdgParams p = skewed_pair(alpha);
    const double total = q.integrate([&](double a) {
      return q.integrate([&](double b) { return std::exp(sgdg_log_density(p, Vector{{a, b}})); });
    });
    EXPECT_NEAR(total, 1.0, 1e-6) << alpha;
  }
}

TEST(SgdgLogDensity, IntegratesToOneInThreeDimensions) {
  const SgdgParams p = chain_three(1.5);
  const Vector m = mean_vector(p);
  const Vector sd = covariance_matrix(p).diagonal().cwiseSqrt();
  std::vector<GaussLegendre> axes;
  for (int i = 0; i < 3; ++i)
    axes.push_back(composite_gauss_legendre(12, 8, m(i) - 9 * sd(i), m(i) + 9 * sd(i)));
  const double total = axes[0].integrate([&](double a) {
    return axes[1].integrate([&](double b) {
      return axes[2].integrate(
          [&](double c) { return std::exp(sgdg_log_density(p, Vector{{a, b, c}})); });
    });
  });
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(SgdgLogDensity, SkewedPairShape) {
  for (double alpha : {2.0, 4.0}) {
    const SgdgParams p = skewed_pair(alpha);
    // Grid mode.
    double best = -1e300;
    Vector mode(2);
    for (double a = -3; a <= 3; a += 0.01)
      for (double b = -3; b <= 3; b += 0.01) {
        const double v = sgdg_log_density(p, Vector{{a, b}});
        if (v > best) {
          best = v;
          mode << a, b;
        }
      }
    // Positive skewness pushes the mode into the positive quadrant and the
    // negative L12 tilts the contours along the diagonal.
    EXPECT_GT(mode(0), 0.0);
    EXPECT_GT(mode(1), 0.0);
    EXPECT_GT(covariance_matrix(p)(0, 1), 0.0);
  }
}

TEST(Reparam, AlphaZero) {
  SgdgParams p = chain_three(0.0);
  const auto r = reparam_forward(p);
  EXPECT_TRUE(r.delta.isZero(0.0));
  EXPECT_EQ(r.omega2, p.factor.D);
}

TEST(Reparam, UnitCase) {
  SgdgParams p{Vector::Zero(1), CholFactor::identity(1), Vector::Ones(1), Graph(1)};
  const auto r = reparam_forward(p);
  EXPECT_NEAR(r.delta(0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.omega2(0), 2.0, 1e-15);
}

TEST(Reparam, RoundTrip) {
  Rng rng(2);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Graph g = test::random_ordered_decomposable(1 + t % 6, rng);
    const SgdgParams p = test::random_sgdg(g, rng, 3.0);
    const SgdgParams back = reparam_inverse(reparam_forward(p), g);
    worst = std::max({worst, (back.alpha - p.alpha).cwiseAbs().maxCoeff(),
                      (back.factor.D - p.factor.D).cwiseAbs().maxCoeff(),
                      (back.factor.L - p.factor.L).cwiseAbs().maxCoeff()});
    // sign of the skewness survives
    for (int i = 0; i < g.size(); ++i)
      ASSERT_EQ(std::signbit(reparam_forward(p).delta(i)), std::signbit(p.alpha(i)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Reparam, RejectsNonPositiveOmega) {
  ReparamParams r = case_c();
  r.omega2(1) = 0.0;
  EXPECT_THROW(reparam_inverse(r, Graph::chain(3)), InvalidDomain);
}

TEST(SampleSgdg, AlphaZeroRecoversPrecision) {
  SgdgParams p = chain_three(0.0);
  Rng rng(3);
  const int n = 1000000;
  const Matrix x = sample_sgdg(p, rng, n);
  const Matrix sigma = assemble_precision(p.factor).inverse();
  const Matrix c = sample_covariance(x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
      EXPECT_NEAR(c(i, j), sigma(i, j), 4 * se);
    }
  const Matrix qhat = c.inverse();
  const Matrix q = assemble_precision(p.factor);
  EXPECT_LT((qhat - q).cwiseAbs().maxCoeff(), 0.02 * q.cwiseAbs().maxCoeff());
}

TEST(SampleSgdg, CaseCMiddleMarginalIsSymmetric) {
  Rng rng(4);
  const Matrix x = sample_sgdg(case_c(), rng, 1000000);
  EXPECT_LT(std::abs(test::skewness(x.col(1))), 0.05);
  EXPECT_GT(std::abs(test::skewness(x.col(0))), 0.1);
}

TEST(SampleSgdg, BothRepresentationsAgree) {
  const SgdgParams p = chain_three(2.0);
  Rng a(5), b(6);
  const int n = 200000;
  const Matrix xa = sample_sgdg(p, a, n);
  const Matrix xb = sample_sgdg(reparam_forward(p), b, n);
  const Matrix sigma = covariance_matrix(p);
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(xa.col(i).mean(), xb.col(i).mean(), 4 * std::sqrt(2 * sigma(i, i) / n));
}

TEST(Moments, AlphaZero) {
  const SgdgParams p = chain_three(0.0);
  EXPECT_LT((mean_vector(p) - p.mu).norm(), 1e-15);
  EXPECT_LT((covariance_matrix(p) - assemble_precision(p.factor).inverse()).norm(), 1e-12);
}

TEST(Moments, MatchMonteCarlo) {
  const SgdgParams p = chain_three(2.0);
  Rng rng(1);
  const int n = 1000000;
  const Matrix x = sample_sgdg(p, rng, n);
  const Vector m = mean_vector(p);
  const Matrix sigma = covariance_matrix(p);
  const Vector xbar = x.colwise().mean();
  const Matrix xc = x.rowwise() - xbar.transpose();
  const Matrix c = xc.transpose() * xc / (n - 1.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(xbar(i), m(i), 3 * std::sqrt(c(i, i) / n)) << i;
    for (int j = 0; j < 3; ++j) {
      const Vector prod = xc.col(i).cwiseProduct(xc.col(j));
      const double se = std::sqrt((prod.array() - prod.mean()).square().mean() / n);
      EXPECT_NEAR(c(i, j), sigma(i, j), 3 * se) << i << "," << j;
    }
  }
}

TEST(Moments, InverseCovarianceKeepsPattern) {
  const SgdgParams p = chain_three(2.0);
  EXPECT_LT(std::abs(inverse_covariance_matrix(p)(0, 2)), 1e-10);
  EXPECT_LT((inverse_covariance_matrix(p) * covariance_matrix(p) - Matrix::Identity(3, 3)).norm(),
            1e-10);
  EXPECT_LT(std::abs(covariance_matrix(p).inverse()(0, 2)), 1e-10);
}

TEST(MarginalDensity, MatchesQuadrature) {
  const SgdgParams p = chain_three(2.0);
  const auto q = composite_gauss_legendre(30, 10, -15.0, 15.0);
  Rng rng(8);
  const std::vector<double> grid = {-1.0, 0.5, 1.5, 3.0};
  const auto f = marginal_density(p, 0, grid, rng, 200000);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double exact = q.integrate([&](double b) {
      return q.integrate([&](double c) {
        return std::exp(sgdg_log_density(p, Vector{{grid[g], b, c}}));
      });
    });
    EXPECT_NEAR(f[g], exact, 0.01 * exact + 1e-4);
  }
}

TEST(CiFactorization, ChainEndsAreIndependent) {
  const SgdgParams p = chain_three(1.7);
  EXPECT_TRUE(ci_factorization_check(p, 0, 2));
  EXPECT_FALSE(ci_factorization_check(p, 0, 1));
  EXPECT_FALSE(ci_factorization_check(p, 1, 2));
}

TEST(CiFactorization, CompleteGraphIsNot) {
  Rng rng(9);
  const SgdgParams p = test::random_sgdg(Graph::complete(3), rng);
  EXPECT_FALSE(ci_factorization_check(p, 0, 2));
}

TEST(CiFactorization, GaussianWithZeroPrecisionEntry) {
  SgdgParams p = chain_three(0.0);
  EXPECT_TRUE(ci_factorization_check(p, 0, 2));
}

TEST(CiFactorization, DimensionLimit) {
  Rng rng(10);
  const SgdgParams p = test::random_sgdg(Graph::chain(5), rng);
  EXPECT_THROW(ci_factorization_check(p, 0, 2), DimensionTooLarge);
}

TEST(Properties, FactorizationIffNonEdge) {
  Rng rng(11);
  for (int t = 0; t < 12; ++t) {
    const Graph g = test::random_ordered_decomposable(2 + t % 3, rng);
    const SgdgParams p = test::random_sgdg(g, rng);
    for (int i = 0; i < g.size(); ++i)
      for (int j = i + 1; j < g.size(); ++j)
        EXPECT_EQ(ci_factorization_check(p, i, j), !g.adjacent(i, j))
            << "graph " << t << " pair " << i << "," << j;
  }
}

TEST(Properties, SeparationImpliesFactorization) {
  // Star with centre 3 (last) and leaves 0, 1, 2; F(0,1) = {2, 3} separates.
  const Graph g(4, {{0, 3}, {1, 3}, {2, 3}});
  Rng rng(12);
  const SgdgParams p = test::random_sgdg(g, rng);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (separates(g, i, j)) {
        EXPECT_TRUE(ci_factorization_check(p, i, j));
      }
}

TEST(SgdgParams, Validation) {
  SgdgParams p = chain_three(1.0);
  EXPECT_NO_THROW(p.validate());
  p.factor.L(0, 2) = 0.3;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = chain_three(1.0);
  p.graph = Graph(3, {{0, 1}, {0, 2}});
  p.factor.L(1, 2) = 0.0;
  p.factor.L(0, 2) = 0.3;
  EXPECT_THROW(p.validate(), NotDecomposable);
}
