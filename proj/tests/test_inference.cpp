#include <gtest/gtest.h>

#include "gibbs_checks.hpp"
#include "sgdg/inference.hpp"
#include "support.hpp"

using namespace sgdg;

namespace {

Matrix noisy_data(int n, int k, Rng& rng) {
  return Matrix::NullaryExpr(n, k, [&] { return 3.0 + rng.normal(); });
}

std::vector<PriorSpec> all_priors(const Graph& g) {
  const int k = g.size();
  const ForwardNeighborSets nb(g);
  Vector psi(k);
  for (int i = 0; i < k; ++i) psi(i) = nb.size_of(i) + 1.5;
  Matrix psi_mat = Matrix::Identity(k, k);
  for (int i = 0; i + 1 < k; ++i) psi_mat(i, i + 1) = psi_mat(i + 1, i) = 0.3;
  auto proper = PriorSpec::independent_proper(k, 10.0, 50.0, 2.0, 1.5, 4.0);
  std::get<IndependentProperPrior>(proper.regime).mu0.setConstant(1.0);
  return {proper, PriorSpec::pattern_wishart(psi_mat, psi, 10.0),
          PriorSpec::noninformative(10.0)};
}

ReparamParams case_a_truth() {
  ReparamParams r{Vector::Constant(3, 5.0), Vector::Constant(3, 2.0), Vector::Ones(3),
                  Matrix::Identity(3, 3)};
  r.L(0, 1) = r.L(1, 2) = -0.5;
  return r;
}

}  // namespace

TEST(CheckPropriety, NoninformativeSampleSizeBound) {
  const Graph chain = Graph::chain(3);
  EXPECT_TRUE(check_propriety(PriorSpec::noninformative(), 3, chain).ok);
  const auto rep = check_propriety(PriorSpec::noninformative(), 2, chain);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.min_sample_size, 3);
  EXPECT_FALSE(rep.violations.empty());
}

TEST(CheckPropriety, WishartDegreesStrictInequality) {
  const Graph chain = Graph::chain(3);  // |N<| = (1, 1, 0)
  const Matrix psi_mat = Matrix::Identity(3, 3);
  EXPECT_FALSE(check_propriety(PriorSpec::pattern_wishart(psi_mat, Vector{{1.0, 1.0, 0.5}}), 1,
                               chain).ok);
  EXPECT_TRUE(check_propriety(PriorSpec::pattern_wishart(psi_mat, Vector{{1.01, 1.01, 0.01}}), 1,
                              chain).ok);
}

TEST(CheckPropriety, ProperPriorAlwaysOk) {
  EXPECT_TRUE(check_propriety(PriorSpec::independent_proper(5), 1, Graph::complete(5)).ok);
}

TEST(ResolveHyperparams, Noninformative) {
  const auto h = resolve_hyperparams(PriorSpec::noninformative(), Matrix::Identity(3, 3),
                                     Vector::Ones(3));
  EXPECT_EQ(h.v_mu, 0.0);
  EXPECT_TRUE(h.s_omega.isZero(0.0));
  EXPECT_TRUE(h.r_omega.isZero(0.0));
  for (const auto& v : h.V_L) EXPECT_TRUE(v.isZero(0.0));
}

TEST(ResolveHyperparams, ProperDefaults) {
  const auto h = resolve_hyperparams(PriorSpec::independent_proper(3), Matrix::Identity(3, 3),
                                     Vector::Ones(3));
  EXPECT_DOUBLE_EQ(h.v_mu, 1e-4);
  EXPECT_TRUE(h.s_omega.isConstant(1e-6));
  EXPECT_TRUE(h.r_omega.isConstant(1e-6));
  EXPECT_TRUE(h.V_L[0].isApprox(Matrix::Identity(3, 3) / 100.0));
}

TEST(ResolveHyperparams, WishartIdentity) {
  const auto prior = PriorSpec::pattern_wishart(Matrix::Identity(3, 3), Vector::Constant(3, 3.0));
  const Vector omega2{{2.0, 3.0, 4.0}};
  const auto h = resolve_hyperparams(prior, Matrix::Identity(3, 3), omega2);
  EXPECT_TRUE(h.r_omega.isConstant(0.5));
  EXPECT_TRUE(h.s_omega.isConstant(1.5));
  EXPECT_TRUE(h.V_L[1].isApprox(3.0 * Matrix::Identity(3, 3)));
}

TEST(Conditionals, SliceRatioAllRegimes) {
  Rng rng(1);
  for (const Graph& g : {Graph::chain(3), Graph::complete(3), Graph(1),
                         Graph(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}})}) {
    const Matrix x = noisy_data(7, g.size(), rng);
    for (const auto& prior : all_priors(g)) {
      const GibbsSampler s(x, g, prior);
      const auto dev = test::slice_ratio_check(s, 50, rng);
      for (int b = 0; b < 5; ++b)
        EXPECT_LT(dev.max_dev[b], 1e-8) << prior.regime_name() << " block " << b
                                        << " k=" << g.size();
    }
  }
}

TEST(Conditionals, SliceRatioWithDeltaFixed) {
  Rng rng(2);
  const Graph g = Graph::chain(3);
  const Matrix x = noisy_data(6, 3, rng);
  for (const auto& prior : all_priors(g)) {
    const GibbsSampler s(x, g, prior, true);
    EXPECT_LT(test::slice_ratio_check(s, 50, rng).worst(), 1e-8) << prior.regime_name();
  }
}

TEST(Conditionals, UCollapsesToHalfNormalAtDeltaZero) {
  Rng rng(3);
  const Graph g = Graph::chain(3);
  const GibbsSampler s(noisy_data(5, 3, rng), g, PriorSpec::noninformative());
  auto st = test::random_state(s, rng);
  st.delta.setZero();
  const auto c = s.u_conditional(st);
  EXPECT_TRUE(c.mean.isZero(0.0));
  EXPECT_TRUE(c.var.isOnes(0.0));
}

TEST(Conditionals, GammaIsShapeRate) {
  Rng rng(4);
  const GammaConditional c{Vector::Constant(1, 3.0), Vector::Constant(1, 6.0)};
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += c.sample(rng)(0);
  EXPECT_NEAR(s / n, 0.5, 4 * std::sqrt(3.0 / 36.0 / n));
}

TEST(Gibbs, DeltaFixedNeverMoves) {
  Rng rng(5);
  const Graph g = Graph::chain(3);
  const GibbsSampler s(noisy_data(20, 3, rng), g, PriorSpec::noninformative(), true);
  auto st = s.initial_state(rng);
  for (int t = 0; t < 100; ++t) {
    s.sweep(st, rng);
    ASSERT_TRUE(st.delta.isZero(0.0));
    ASSERT_TRUE((st.u.array() >= 0).all());
  }
}

TEST(Gibbs, StatePreservesInvariants) {
  Rng rng(6);
  const Graph g = test::random_ordered_decomposable(5, rng);
  const GibbsSampler s(noisy_data(30, 5, rng), g, PriorSpec::independent_proper(5));
  auto st = s.initial_state(rng);
  for (int t = 0; t < 200; ++t) {
    s.sweep(st, rng);
    ASSERT_TRUE((st.u.array() >= 0).all());
    ASSERT_TRUE((st.omega2.array() > 0).all());
    ASSERT_TRUE(verify_pattern(CholFactor{st.L, st.omega2}, g));
  }
}

TEST(Gibbs, GewekeJointDistributionTest) {
  Rng rng(7);
  const Graph g = Graph::chain(3);
  const auto res = test::geweke_test(g, test::geweke_prior(3), 5, 100000, 100000, rng);
  EXPECT_LT(res.max_abs_z, 4.0) << res.worst;
}

TEST(RunChain, RefusesImproperPosterior) {
  const Graph g = Graph::chain(3);
  const Matrix one_row = Matrix::Ones(1, 3);
  ChainConfig cfg;
  cfg.iters = 10;
  EXPECT_THROW(run_chain(one_row, g, PriorSpec::noninformative(), cfg), ProprietyViolation);
  const auto wishart = PriorSpec::pattern_wishart(Matrix::Identity(3, 3), Vector{{1.0, 2.0, 2.0}});
  EXPECT_THROW(run_chain(Matrix::Ones(10, 3), g, wishart, cfg), ProprietyViolation);
}

TEST(RunChain, RefusesUnorderedGraphAndBadShapes) {
  ChainConfig cfg;
  cfg.iters = 10;
  const Graph unordered(3, {{0, 1}, {0, 2}});  // vertex 0 first: 1, 2 not adjacent
  EXPECT_THROW(run_chain(Matrix::Ones(10, 3), unordered, PriorSpec::noninformative(), cfg),
               NotDecomposable);
  EXPECT_THROW(run_chain(Matrix::Ones(10, 2), Graph::chain(3), PriorSpec::noninformative(), cfg),
               DimensionMismatch);
}

TEST(RunChain, DeterministicUnderSeed) {
  Rng rng(8);
  const Matrix x = sample_sgdg(case_a_truth(), rng, 50);
  ChainConfig cfg;
  cfg.iters = 300;
  cfg.thin = 3;
  cfg.seed = 42;
  const auto a = run_chain(x, Graph::chain(3), PriorSpec::independent_proper(3), cfg);
  const auto b = run_chain(x, Graph::chain(3), PriorSpec::independent_proper(3), cfg);
  ASSERT_EQ(a.draws.size(), b.draws.size());
  ASSERT_EQ(a.loglik.size(), a.draws.size());
  EXPECT_EQ(a.draws.size(), 80u);  // (300 - 60) / 3
  for (std::size_t s = 0; s < a.draws.size(); ++s) {
    ASSERT_EQ(a.loglik[s], b.loglik[s]);
    ASSERT_EQ(a.draws[s].L, b.draws[s].L);
    ASSERT_EQ(a.draws[s].delta, b.draws[s].delta);
  }
  cfg.seed = 43;
  const auto c = run_chain(x, Graph::chain(3), PriorSpec::independent_proper(3), cfg);
  EXPECT_NE(a.loglik.back(), c.loglik.back());
}

TEST(RunChain, LogLikelihoodMatchesDensity) {
  Rng rng(9);
  const Matrix x = sample_sgdg(case_a_truth(), rng, 40);
  ChainConfig cfg;
  cfg.iters = 50;
  cfg.thin = 10;
  const auto t = run_chain(x, Graph::chain(3), PriorSpec::noninformative(), cfg);
  for (std::size_t s = 0; s < t.draws.size(); ++s) {
    const auto& d = t.draws[s];
    const auto p = reparam_inverse({d.mu, d.delta, d.omega2, d.L}, Graph::chain(3));
    double ll = 0.0;
    for (int i = 0; i < x.rows(); ++i) ll += sgdg_log_density(p, x.row(i).transpose());
    EXPECT_NEAR(t.loglik[s], ll, 1e-9 * std::abs(ll));
  }
}

TEST(RunChain, CaseARecoversTruth) {
  Rng rng(10);
  const auto truth = case_a_truth();
  const Matrix x = sample_sgdg(truth, rng, 200);
  ChainConfig cfg;
  cfg.iters = 10000;
  cfg.seed = 11;
  const auto t = run_chain(x, Graph::chain(3), PriorSpec::noninformative(100.0), cfg);
  const auto s = summarize(t);
  for (int i = 0; i < 3; ++i) {
    const auto& d = find_summary(s, "delta[" + std::to_string(i + 1) + "]");
    EXPECT_NEAR(d.mean, truth.delta(i), 3 * d.sd) << d.name;
  }
  const auto& l12 = find_summary(s, "L[1,2]");
  EXPECT_NEAR(l12.mean, -0.5, 3 * l12.sd);
}

TEST(Summarize, ConstantTraceHasZeroSd) {
  Trace t;
  t.meta.graph = Graph::chain(2);
  ParamDraw d{Vector::Ones(2), Vector::Zero(2), Vector::Ones(2), Matrix::Identity(2, 2)};
  d.L(0, 1) = -0.3;
  t.draws.assign(10, d);
  t.loglik.assign(10, -1.0);
  for (const auto& s : summarize(t)) {
    EXPECT_EQ(s.sd, 0.0) << s.name;
    EXPECT_EQ(s.q025, s.q975);
  }
  EXPECT_DOUBLE_EQ(find_summary(summarize(t), "L[1,2]").mean, -0.3);
}

TEST(Summarize, EmptyTraceThrows) {
  EXPECT_THROW(summarize(Trace{}), EmptyTrace);
  EXPECT_THROW(posterior_mean(Trace{}), EmptyTrace);
}

TEST(Summarize, QuantilesAndEss) {
  Trace t;
  t.meta.graph = Graph(1);
  Rng rng(12);
  for (int s = 0; s < 4000; ++s) {
    t.draws.push_back({Vector::Constant(1, rng.normal()), Vector::Zero(1), Vector::Ones(1),
                       Matrix::Identity(1, 1)});
    t.loglik.push_back(0.0);
  }
  const auto& mu = find_summary(summarize(t), "mu[1]");
  EXPECT_NEAR(mu.q025, -1.96, 0.15);
  EXPECT_NEAR(mu.q975, 1.96, 0.15);
  EXPECT_GT(mu.ess, 2500);
}

TEST(PriorSampling, RequiresProperRegime) {
  Rng rng(13);
  EXPECT_THROW(sample_prior(PriorSpec::noninformative(), Graph::chain(3), rng), InvalidParams);
}
