#pragma once

// Block Gibbs sampler for the SGDG hierarchical model
//
//   x_i | u_i ~ N_k(mu + L^-1 D_delta u_i, (L' D_omega L)^-1)
//   u_i       ~ HN_k(0, I)
//   delta     ~ N_k(0, b1 D_omega^-1)
//
// under three prior regimes for (mu, omega^2, L). Every full conditional is
// derived from that joint (see log_joint) rather than transcribed, and each is
// exposed as a distribution object so its density can be checked against the
// joint. Two printed formulas differ from the derivation:
//   * the L-row conditional uses M = sum_i u_i (x_i - mu)' (centred);
//   * the delta conditional covariance (Sigma_delta D_omega)^-1 is diagonal,
//     so the printed product form is used as is.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sgdg/error.hpp"
#include "sgdg/graph.hpp"
#include "sgdg/linalg.hpp"
#include "sgdg/normal.hpp"
#include "sgdg/rng.hpp"
#include "sgdg/sgdg.hpp"

namespace sgdg {

// ---------------------------------------------------------------------------
// Priors

/// mu ~ N(mu0, b2 I), omega_i^2 ~ G(b3, b4), free L entries ~ N(0, b5).
struct IndependentProperPrior {
  Vector mu0;
  double b2 = 1e4;
  double b3 = 1e-6;
  double b4 = 1e-6;
  double b5 = 100.0;
};

/// pi(L, D_omega) prop. prod (omega_i^2)^{psi_i/2 - 1} exp(-tr(L'D_omega L Psi)/2),
/// flat prior on mu.
struct PatternWishartPrior {
  Matrix Psi;
  Vector psi;
};

/// pi(mu, L, omega^2) prop. prod 1/omega_i^2.
struct NoninformativePrior {};

struct PriorSpec {
  double b1 = 100.0;  // delta | omega ~ N(0, b1 D_omega^-1) in every regime
  std::variant<IndependentProperPrior, PatternWishartPrior, NoninformativePrior>
      regime = NoninformativePrior{};

  static PriorSpec noninformative(double b1 = 100.0) {
    return {b1, NoninformativePrior{}};
  }
  static PriorSpec independent_proper(int k, double b1 = 100.0,
                                      double b2 = 1e4, double b3 = 1e-6,
                                      double b4 = 1e-6, double b5 = 100.0) {
    return {b1, IndependentProperPrior{Vector::Zero(k), b2, b3, b4, b5}};
  }
  static PriorSpec pattern_wishart(Matrix Psi, Vector psi, double b1 = 100.0) {
    return {b1, PatternWishartPrior{std::move(Psi), std::move(psi)}};
  }

  std::string regime_name() const {
    switch (regime.index()) {
      case 0: return "proper";
      case 1: return "wishart";
      default: return "noninfo";
    }
  }

  void validate(int k) const {
    if (!(b1 > 0.0)) throw InvalidParams("b1 must be positive");
    if (auto* p = std::get_if<IndependentProperPrior>(&regime)) {
      if (p->mu0.size() != k) throw DimensionMismatch("mu0 length");
      if (!(p->b2 > 0 && p->b3 > 0 && p->b4 > 0 && p->b5 > 0))
        throw InvalidParams("b2..b5 must be positive");
    } else if (auto* w = std::get_if<PatternWishartPrior>(&regime)) {
      if (w->Psi.rows() != k || w->Psi.cols() != k || w->psi.size() != k)
        throw DimensionMismatch("Psi / psi dimensions");
      if (!is_symmetric(w->Psi, 1e-10) || w->Psi.llt().info() != Eigen::Success)
        throw NotPositiveDefinite("Psi must be SPD");
      if ((w->psi.array() <= 0.0).any())
        throw InvalidParams("psi entries must be positive");
    }
  }
};

struct ProprietyReport {
  bool ok = true;
  int min_sample_size = 1;
  std::vector<std::string> violations;
};

/// Noninformative: n >= max|N<(i)| + 2. Pattern-Wishart: psi_i > |N<(i)|.
/// Independent proper priors always give a proper posterior.
inline ProprietyReport check_propriety(const PriorSpec& prior, int n,
                                       const Graph& g) {
  const ForwardNeighborSets nbrs(g);
  ProprietyReport rep;
  if (std::holds_alternative<NoninformativePrior>(prior.regime)) {
    rep.min_sample_size = nbrs.max_size() + 2;
    if (n < rep.min_sample_size) {
      rep.ok = false;
      rep.violations.push_back("noninformative prior needs n >= " +
                               std::to_string(rep.min_sample_size) +
                               ", got n = " + std::to_string(n));
    }
  } else if (auto* w = std::get_if<PatternWishartPrior>(&prior.regime)) {
    for (int i = 0; i < g.size(); ++i) {
      if (i >= w->psi.size() || !(w->psi(i) > nbrs.size_of(i))) {
        rep.ok = false;
        rep.violations.push_back(
            "psi_" + std::to_string(i + 1) + " must exceed |N<(" +
            std::to_string(i + 1) + ")| = " + std::to_string(nbrs.size_of(i)));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// State

struct GibbsState {
  Vector mu;
  Vector delta;
  Vector omega2;
  Matrix L;
  Matrix u;  // n x k, nonnegative

  ReparamParams params() const { return {mu, delta, omega2, L}; }
};

struct ResolvedHyperparams {
  double v_mu = 0.0;
  Vector mu0;
  Vector s_omega;
  Vector r_omega;
  std::vector<Matrix> V_L;  // prior precision on row i of L (k x k)
};

inline ResolvedHyperparams resolve_hyperparams(const PriorSpec& prior,
                                               const Matrix& L,
                                               const Vector& omega2) {
  const int k = static_cast<int>(L.rows());
  ResolvedHyperparams h;
  h.mu0 = Vector::Zero(k);
  h.s_omega = Vector::Zero(k);
  h.r_omega = Vector::Zero(k);
  h.V_L.assign(k, Matrix::Zero(k, k));
  if (auto* p = std::get_if<IndependentProperPrior>(&prior.regime)) {
    h.v_mu = 1.0 / p->b2;
    h.mu0 = p->mu0;
    h.s_omega.setConstant(p->b3);
    h.r_omega.setConstant(p->b4);
    for (auto& v : h.V_L) v = Matrix::Identity(k, k) / p->b5;
  } else if (auto* w = std::get_if<PatternWishartPrior>(&prior.regime)) {
    h.s_omega = 0.5 * w->psi;
    for (int i = 0; i < k; ++i) {
      h.r_omega(i) = 0.5 * L.row(i).dot(w->Psi * L.row(i).transpose());
      h.V_L[i] = omega2(i) * w->Psi;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Conditional distributions

/// N(mean, precision^-1).
struct GaussianConditional {
  Vector mean;
  Matrix precision;

  Vector sample(Rng& rng) const {
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success)
      throw NumericalFailure("conditional precision is not SPD");
    Vector z(mean.size());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return mean + llt.matrixU().solve(z);
  }

  double log_density(const Vector& x) const {
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success)
      throw NumericalFailure("conditional precision is not SPD");
    const Vector d = x - mean;
    return -0.5 * d.dot(precision * d) +
           llt.matrixLLT().diagonal().array().log().sum() -
           static_cast<double>(x.size()) * kLogSqrt2Pi;
  }
};

/// Independent Gamma(shape_i, rate_i) components.
struct GammaConditional {
  Vector shape;
  Vector rate;

  Vector sample(Rng& rng) const {
    Vector x(shape.size());
    for (int i = 0; i < x.size(); ++i) x(i) = rng.gamma(shape(i), rate(i));
    return x;
  }

  double log_density(const Vector& x) const {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i)
      s += shape(i) * std::log(rate(i)) - std::lgamma(shape(i)) +
           (shape(i) - 1.0) * std::log(x(i)) - rate(i) * x(i);
    return s;
  }
};

/// Independent N(mean_ij, var_j) entries truncated to [0, inf).
struct TruncatedNormalConditional {
  Matrix mean;  // n x k
  Vector var;   // k

  Matrix sample(Rng& rng) const {
    Matrix u(mean.rows(), mean.cols());
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j)
        u(i, j) = sample_truncated_normal(mean(i, j), var(j), 0.0, rng);
    return u;
  }

  double log_density(const Matrix& u) const {
    double s = 0.0;
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) {
        if (u(i, j) < 0.0) return -std::numeric_limits<double>::infinity();
        const double sd = std::sqrt(var(j));
        s += norm_logpdf((u(i, j) - mean(i, j)) / sd) - std::log(sd) -
             norm_logcdf(mean(i, j) / sd);
      }
    return s;
  }
};

// ---------------------------------------------------------------------------
// Sampler

class GibbsSampler {
 public:
  GibbsSampler(Matrix data, Graph graph, PriorSpec prior,
               bool fix_delta_zero = false)
      : x_(std::move(data)),
        graph_(std::move(graph)),
        nbrs_(graph_),
        prior_(std::move(prior)),
        fix_delta_zero_(fix_delta_zero) {
    if (x_.cols() != graph_.size())
      throw DimensionMismatch("data has " + std::to_string(x_.cols()) +
                              " columns but the graph has " +
                              std::to_string(graph_.size()) + " vertices");
    if (x_.rows() < 1) throw DimensionMismatch("data has no rows");
    require_ordered(graph_);
    prior_.validate(graph_.size());
  }

  int n() const { return static_cast<int>(x_.rows()); }
  int k() const { return graph_.size(); }
  const Matrix& data() const { return x_; }
  const Graph& graph() const { return graph_; }
  const PriorSpec& prior() const { return prior_; }
  const ForwardNeighborSets& forward_neighbors() const { return nbrs_; }
  bool fix_delta_zero() const { return fix_delta_zero_; }

  ResolvedHyperparams hyper(const GibbsState& s) const {
    return resolve_hyperparams(prior_, s.L, s.omega2);
  }

  /// Unnormalised log p(x, u, mu, delta, omega^2, L).
  double log_joint(const GibbsState& s) const {
    const double inf = std::numeric_limits<double>::infinity();
    if ((s.u.array() < 0.0).any() || (s.omega2.array() <= 0.0).any())
      return -inf;
    const int n_ = n(), k_ = k();
    double lp = 0.0;
    const Matrix r = residuals(s);
    for (int j = 0; j < k_; ++j)
      lp += 0.5 * n_ * std::log(s.omega2(j)) -
            0.5 * s.omega2(j) * r.col(j).squaredNorm();
    lp += (-0.5 * s.u.array().square()).sum();
    if (!fix_delta_zero_) {
      for (int j = 0; j < k_; ++j)
        lp += 0.5 * std::log(s.omega2(j)) -
              0.5 * s.omega2(j) * s.delta(j) * s.delta(j) / prior_.b1;
    }
    if (auto* p = std::get_if<IndependentProperPrior>(&prior_.regime)) {
      lp -= 0.5 * (s.mu - p->mu0).squaredNorm() / p->b2;
      for (int j = 0; j < k_; ++j)
        lp += (p->b3 - 1.0) * std::log(s.omega2(j)) - p->b4 * s.omega2(j);
      for (int i = 0; i < k_; ++i)
        for (int j : nbrs_[i]) lp -= 0.5 * s.L(i, j) * s.L(i, j) / p->b5;
    } else if (auto* w = std::get_if<PatternWishartPrior>(&prior_.regime)) {
      for (int j = 0; j < k_; ++j)
        lp += (0.5 * w->psi(j) - 1.0) * std::log(s.omega2(j)) -
              0.5 * s.omega2(j) * s.L.row(j).dot(w->Psi * s.L.row(j).transpose());
    } else {
      lp -= s.omega2.array().log().sum();
    }
    return lp;
  }

  // --- full conditionals -------------------------------------------------

  /// u_ij | rest ~ N(w_j delta_j y_ij / (1 + w_j delta_j^2), 1 / (1 + w_j
  /// delta_j^2)) on [0, inf) with y_i = L (x_i - mu), w_j = omega_j^2.
  TruncatedNormalConditional u_conditional(const GibbsState& s) const {
    const Matrix y = centred(s) * s.L.transpose();
    TruncatedNormalConditional c{Matrix(n(), k()), Vector(k())};
    for (int j = 0; j < k(); ++j) {
      const double prec = 1.0 + s.omega2(j) * s.delta(j) * s.delta(j);
      c.var(j) = 1.0 / prec;
      c.mean.col(j) = y.col(j) * (s.omega2(j) * s.delta(j) / prec);
    }
    return c;
  }

  /// delta_j | rest ~ N(sum_i u_ij y_ij / (sum_i u_ij^2 + 1/b1),
  ///                    1 / (omega_j^2 (sum_i u_ij^2 + 1/b1))).
  GaussianConditional delta_conditional(const GibbsState& s) const {
    const Matrix y = centred(s) * s.L.transpose();
    GaussianConditional c{Vector(k()), Matrix::Zero(k(), k())};
    for (int j = 0; j < k(); ++j) {
      const double sd = s.u.col(j).squaredNorm() + 1.0 / prior_.b1;
      c.mean(j) = s.u.col(j).dot(y.col(j)) / sd;
      c.precision(j, j) = s.omega2(j) * sd;
    }
    return c;
  }

  /// mu | rest ~ N(Sigma_mu^-1 [Q sum_i z_i + v_mu mu0], Sigma_mu^-1) with
  /// z_i = x_i - L^-1 D_delta u_i, Q = L' D_omega L, Sigma_mu = n Q + v_mu I.
  GaussianConditional mu_conditional(const GibbsState& s) const {
    const auto h = hyper(s);
    const CholFactor f{s.L, s.omega2};
    const Matrix q = assemble_precision(f);
    Vector zsum = x_.colwise().sum().transpose();
    const Vector du = s.u.colwise().sum().transpose().cwiseProduct(s.delta);
    zsum -= solve_unit_triangular(f, du);
    GaussianConditional c;
    c.precision = n() * q + h.v_mu * Matrix::Identity(k(), k());
    c.mean = c.precision.llt().solve(q * zsum + h.v_mu * h.mu0);
    return c;
  }

  /// omega_j^2 | rest ~ G(s_j + (n+1)/2, r_j + (L S_u L')_jj / 2 + delta_j^2 /
  /// (2 b1)); without the delta block the shape is s_j + n/2.
  GammaConditional omega2_conditional(const GibbsState& s) const {
    const auto h = hyper(s);
    const Matrix r = residuals(s);
    GammaConditional c{Vector(k()), Vector(k())};
    for (int j = 0; j < k(); ++j) {
      c.shape(j) = h.s_omega(j) + 0.5 * n() + (fix_delta_zero_ ? 0.0 : 0.5);
      c.rate(j) = h.r_omega(j) + 0.5 * r.col(j).squaredNorm();
      if (!fix_delta_zero_)
        c.rate(j) += 0.5 * s.delta(j) * s.delta(j) / prior_.b1;
    }
    return c;
  }

  /// Free entries of row i of L (columns N<(i)):
  ///   N(P^-1 [omega_i^2 delta_i M_iN - zeta], P^-1),
  ///   P = omega_i^2 S_NN + V_NN, zeta = omega_i^2 S_iN + V_iN,
  /// with S = sum (x - mu)(x - mu)' and M = sum_l u_l (x_l - mu)'.
  GaussianConditional L_row_conditional(const GibbsState& s, int i) const {
    const auto& nb = nbrs_[i];
    const int m = static_cast<int>(nb.size());
    const auto h = hyper(s);
    const Matrix xc = centred(s);
    const double w = s.omega2(i);
    GaussianConditional c{Vector(m), Matrix(m, m)};
    Vector rhs(m);
    for (int a = 0; a < m; ++a) {
      const auto ca = xc.col(nb[a]);
      for (int b = 0; b < m; ++b)
        c.precision(a, b) = w * ca.dot(xc.col(nb[b])) + h.V_L[i](nb[a], nb[b]);
      const double zeta = w * xc.col(i).dot(ca) + h.V_L[i](i, nb[a]);
      rhs(a) = w * s.delta(i) * s.u.col(i).dot(ca) - zeta;
    }
    c.mean = c.precision.llt().solve(rhs);
    return c;
  }

  // --- updates ------------------------------------------------------------

  void update_u(GibbsState& s, Rng& rng) const {
    s.u = u_conditional(s).sample(rng);
  }
  void update_delta(GibbsState& s, Rng& rng) const {
    if (fix_delta_zero_) {
      s.delta.setZero();
      return;
    }
    s.delta = delta_conditional(s).sample(rng);
  }
  void update_mu(GibbsState& s, Rng& rng) const {
    s.mu = mu_conditional(s).sample(rng);
  }
  void update_omega2(GibbsState& s, Rng& rng) const {
    s.omega2 = omega2_conditional(s).sample(rng);
    if (!(s.omega2.array() > 0.0).all() || !s.omega2.allFinite())
      throw NumericalFailure("omega^2 draw left the positive half-line");
  }
  void update_L(GibbsState& s, Rng& rng) const {
    for (int i = 0; i < k(); ++i) {
      if (nbrs_[i].empty()) continue;
      const Vector row = L_row_conditional(s, i).sample(rng);
      for (std::size_t a = 0; a < nbrs_[i].size(); ++a)
        s.L(i, nbrs_[i][a]) = row(static_cast<int>(a));
    }
  }

  /// Fixed scan u -> delta -> mu -> omega^2 -> L rows.
  void sweep(GibbsState& s, Rng& rng) const {
    update_u(s, rng);
    update_delta(s, rng);
    update_mu(s, rng);
    update_omega2(s, rng);
    update_L(s, rng);
  }

  /// mu at the sample mean, (L, omega^2) from the pattern-constrained
  /// regressions of each column on its forward neighbours, delta = 0 and
  /// half-normal latents.
  GibbsState initial_state(Rng& rng) const {
    GibbsState s;
    const int k_ = k();
    s.mu = x_.colwise().mean().transpose();
    const Matrix xc = x_.rowwise() - s.mu.transpose();
    Matrix cov = xc.transpose() * xc / std::max(1, n() - 1);
    const double ridge = 1e-6 * std::max(cov.trace() / k_, 1e-12);
    cov += ridge * Matrix::Identity(k_, k_);
    s.L = Matrix::Identity(k_, k_);
    s.omega2 = Vector(k_);
    for (int i = 0; i < k_; ++i) {
      const auto& nb = nbrs_[i];
      const int m = static_cast<int>(nb.size());
      double resid = cov(i, i);
      if (m > 0) {
        Matrix snn(m, m);
        Vector sni(m);
        for (int a = 0; a < m; ++a) {
          sni(a) = cov(nb[a], i);
          for (int b = 0; b < m; ++b) snn(a, b) = cov(nb[a], nb[b]);
        }
        const Vector beta = snn.llt().solve(sni);
        for (int a = 0; a < m; ++a) s.L(i, nb[a]) = -beta(a);
        resid -= sni.dot(beta);
      }
      s.omega2(i) = 1.0 / std::max(resid, ridge);
    }
    s.delta = Vector::Zero(k_);
    s.u = Matrix(n(), k_);
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < k_; ++j) s.u(i, j) = sample_half_normal(rng);
    return s;
  }

  /// Residuals r_i = L (x_i - mu) - D_delta u_i, as rows.
  Matrix residuals(const GibbsState& s) const {
    Matrix r = centred(s) * s.L.transpose();
    r -= s.u * s.delta.asDiagonal();
    return r;
  }

 private:
  Matrix centred(const GibbsState& s) const {
    return x_.rowwise() - s.mu.transpose();
  }

  Matrix x_;
  Graph graph_;
  ForwardNeighborSets nbrs_;
  PriorSpec prior_;
  bool fix_delta_zero_;
};

/// Draw (mu, delta, omega^2, L) from an independent proper prior.
inline ReparamParams sample_prior(const PriorSpec& prior, const Graph& g,
                                  Rng& rng) {
  const auto* p = std::get_if<IndependentProperPrior>(&prior.regime);
  if (!p) throw InvalidParams("prior sampling needs the independent proper regime");
  const int k = g.size();
  const ForwardNeighborSets nbrs(g);
  ReparamParams r{Vector(k), Vector(k), Vector(k), Matrix::Identity(k, k)};
  for (int i = 0; i < k; ++i) {
    r.mu(i) = p->mu0(i) + std::sqrt(p->b2) * rng.normal();
    r.omega2(i) = rng.gamma(p->b3, p->b4);
    r.delta(i) = std::sqrt(prior.b1 / r.omega2(i)) * rng.normal();
    for (int j : nbrs[i]) r.L(i, j) = std::sqrt(p->b5) * rng.normal();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Chains

struct ChainConfig {
  int iters = 50000;
  std::optional<int> burn_in;  // default: 20% of iters
  int thin = 10;
  std::uint64_t seed = 1;
  bool fix_delta_zero = false;

  int resolved_burn_in() const { return burn_in.value_or(iters / 5); }
};

struct ParamDraw {
  Vector mu;
  Vector delta;
  Vector omega2;
  Matrix L;
};

struct TraceMeta {
  std::uint64_t seed = 0;
  int iters = 0;
  int burn_in = 0;
  int thin = 1;
  bool fix_delta_zero = false;
  std::string sweep_order = "u,delta,mu,omega2,L";
  PriorSpec prior;
  Graph graph;
  int n = 0;
  std::string data_fingerprint;
};

struct Trace {
  std::vector<ParamDraw> draws;
  std::vector<double> loglik;  // observed-data log likelihood per draw
  TraceMeta meta;
};

/// FNV-1a over the bit patterns of the data, column count first.
inline std::string data_fingerprint(const Matrix& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(data.rows()));
  mix(static_cast<std::uint64_t>(data.cols()));
  for (int i = 0; i < data.rows(); ++i)
    for (int j = 0; j < data.cols(); ++j) {
      std::uint64_t bits;
      const double v = data(i, j);
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Trace run_chain(const Matrix& data, const Graph& g,
                       const PriorSpec& prior, const ChainConfig& cfg) {
  if (data.cols() != g.size())
    throw DimensionMismatch("data columns differ from graph size");
  require_ordered(g);
  const auto rep = check_propriety(prior, static_cast<int>(data.rows()), g);
  if (!rep.ok) throw ProprietyViolation(rep.violations.front());
  const int burn = cfg.resolved_burn_in();
  if (cfg.iters < 1 || cfg.thin < 1 || burn < 0 || burn >= cfg.iters)
    throw InvalidParams("need iters >= 1, thin >= 1, 0 <= burn_in < iters");

  GibbsSampler sampler(data, g, prior, cfg.fix_delta_zero);
  Rng rng(cfg.seed);
  GibbsState state = sampler.initial_state(rng);

  Trace trace;
  trace.meta = {cfg.seed, cfg.iters, burn,   cfg.thin, cfg.fix_delta_zero,
                "u,delta,mu,omega2,L",   prior, g,  static_cast<int>(data.rows()),
                data_fingerprint(data)};
  for (int t = 1; t <= cfg.iters; ++t) {
    sampler.sweep(state, rng);
    if (t > burn && (t - burn) % cfg.thin == 0) {
      trace.draws.push_back({state.mu, state.delta, state.omega2, state.L});
      trace.loglik.push_back(
          sgdg_log_likelihood(reparam_inverse(state.params(), g), data));
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Summaries

struct ParamSummary {
  std::string name;
  double mean = 0, sd = 0, q025 = 0, q50 = 0, q975 = 0, ess = 0;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = (v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

// Geyer initial positive sequence estimate.
inline double effective_sample_size(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0;
  for (double x : v) mean += x;
  mean /= n;
  double c0 = 0;
  for (double x : v) c0 += (x - mean) * (x - mean);
  c0 /= n;
  if (c0 <= 0) return static_cast<double>(n);
  auto acf = [&](std::size_t lag) {
    double c = 0;
    for (std::size_t i = 0; i + lag < n; ++i)
      c += (v[i] - mean) * (v[i + lag] - mean);
    return c / n / c0;
  };
  double tau = -1.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = acf(lag) + acf(lag + 1);
    if (pair <= 0) break;
    tau += 2.0 * pair;
  }
  return n / std::max(tau, 1e-12);
}

inline ParamSummary summarize_series(std::string name,
                                     const std::vector<double>& v) {
  ParamSummary s;
  s.name = std::move(name);
  // Shifted sums: exact for constant series.
  const double n = static_cast<double>(v.size());
  const double shift = v.front();
  double s1 = 0, s2 = 0;
  for (double x : v) {
    s1 += x - shift;
    s2 += (x - shift) * (x - shift);
  }
  s.mean = shift + s1 / n;
  s.sd = v.size() > 1 ? std::sqrt(std::max(0.0, (s2 - s1 * s1 / n) / (n - 1))) : 0.0;
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  s.q025 = quantile_sorted(sorted, 0.025);
  s.q50 = quantile_sorted(sorted, 0.5);
  s.q975 = quantile_sorted(sorted, 0.975);
  s.ess = effective_sample_size(v);
  return s;
}

}  // namespace detail

/// Posterior mean, SD, 2.5/50/97.5% quantiles and ESS for every scalar
/// parameter: mu[i], delta[i], omega2[i], L[i,j] for edges i<j (1-based).
inline std::vector<ParamSummary> summarize(const Trace& trace) {
  if (trace.draws.empty()) throw EmptyTrace("trace holds no draws");
  const int k = static_cast<int>(trace.draws.front().mu.size());
  std::vector<ParamSummary> out;
  auto collect = [&](const std::string& name, auto&& get) {
    std::vector<double> v;
    v.reserve(trace.draws.size());
    for (const auto& d : trace.draws) v.push_back(get(d));
    out.push_back(detail::summarize_series(name, v));
  };
  for (int i = 0; i < k; ++i)
    collect("mu[" + std::to_string(i + 1) + "]",
            [i](const ParamDraw& d) { return d.mu(i); });
  for (int i = 0; i < k; ++i)
    collect("delta[" + std::to_string(i + 1) + "]",
            [i](const ParamDraw& d) { return d.delta(i); });
  for (int i = 0; i < k; ++i)
    collect("omega2[" + std::to_string(i + 1) + "]",
            [i](const ParamDraw& d) { return d.omega2(i); });
  const Graph& g = trace.meta.graph;
  for (auto [i, j] : g.edges())
    collect("L[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]",
            [i, j](const ParamDraw& d) { return d.L(i, j); });
  return out;
}

inline const ParamSummary& find_summary(const std::vector<ParamSummary>& s,
                                        const std::string& name) {
  for (const auto& p : s)
    if (p.name == name) return p;
  throw InvalidParams("no parameter named " + name);
}

/// Posterior-mean parameters as a single SGDG parameter set.
inline ReparamParams posterior_mean(const Trace& trace) {
  if (trace.draws.empty()) throw EmptyTrace("trace holds no draws");
  ReparamParams m{Vector::Zero(trace.draws[0].mu.size()),
                  Vector::Zero(trace.draws[0].mu.size()),
                  Vector::Zero(trace.draws[0].mu.size()),
                  Matrix::Zero(trace.draws[0].L.rows(), trace.draws[0].L.cols())};
  for (const auto& d : trace.draws) {
    m.mu += d.mu;
    m.delta += d.delta;
    m.omega2 += d.omega2;
    m.L += d.L;
  }
  const double n = static_cast<double>(trace.draws.size());
  m.mu /= n;
  m.delta /= n;
  m.omega2 /= n;
  m.L /= n;
  return m;
}

}  // namespace sgdg
