#pragma once

// Skew Gaussian decomposable graphical model: a CSN_{k,k}(mu, Q^-1, D_a L,
// 0, D_k^-1) vector whose precision Q = L' D_k L carries the zero pattern of
// a decomposable graph labelled in perfect elimination order.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "sgdg/csn.hpp"
#include "sgdg/error.hpp"
#include "sgdg/graph.hpp"
#include "sgdg/linalg.hpp"
#include "sgdg/normal.hpp"
#include "sgdg/quadrature.hpp"
#include "sgdg/rng.hpp"

namespace sgdg {

/// (mu, L, D_kappa = diag(kappa^2), alpha) on an ordered decomposable graph.
struct SgdgParams {
  Vector mu;
  CholFactor factor;  // factor.D holds kappa_i^2
  Vector alpha;
  Graph graph;

  int dim() const { return static_cast<int>(mu.size()); }

  Matrix precision() const { return assemble_precision(factor); }

  void validate() const {
    const int k = graph.size();
    if (mu.size() != k || alpha.size() != k || factor.size() != k)
      throw DimensionMismatch("SGDG parameter lengths differ from graph size");
    if (!factor.valid())
      throw InvalidDomain("L must be unit upper triangular with positive D");
    require_ordered(graph);
    if (!verify_pattern(factor, graph))
      throw InvalidParams("L pattern does not match the graph");
  }

  /// The same law written as a CSN parameter set.
  CsnParams as_csn() const {
    const int k = dim();
    CsnParams p;
    p.mu = mu;
    p.sigma = precision().inverse();
    p.sigma = 0.5 * (p.sigma + p.sigma.transpose());
    p.gamma = alpha.asDiagonal() * factor.L;
    p.nu = Vector::Zero(k);
    p.delta = factor.D.cwiseInverse().asDiagonal();
    return p;
  }
};

/// (mu, delta, omega^2, L) of the hierarchical representation.
struct ReparamParams {
  Vector mu;
  Vector delta;
  Vector omega2;
  Matrix L;
};

inline double sgdg_log_density(const SgdgParams& p, const Vector& x) {
  const int k = p.dim();
  if (x.size() != k) throw DimensionMismatch("point has wrong length");
  const Vector y = p.factor.L * (x - p.mu);
  double s = 0.5 * k * std::log(2.0 / std::numbers::pi);
  for (int r = 0; r < k; ++r) {
    const double kappa2 = p.factor.D(r);
    s += 0.5 * std::log(kappa2) - 0.5 * kappa2 * y(r) * y(r) +
         norm_logcdf(p.alpha(r) * std::sqrt(kappa2) * y(r));
  }
  return s;
}

/// Sum of log densities over the rows of `data`.
inline double sgdg_log_likelihood(const SgdgParams& p, const Matrix& data) {
  double s = 0.0;
  for (int i = 0; i < data.rows(); ++i)
    s += sgdg_log_density(p, data.row(i).transpose());
  return s;
}

inline ReparamParams reparam_forward(const SgdgParams& p) {
  const int k = p.dim();
  ReparamParams r{p.mu, Vector(k), Vector(k), p.factor.L};
  for (int i = 0; i < k; ++i) {
    const double a = p.alpha(i);
    const double kappa = std::sqrt(p.factor.D(i));
    const double root = std::sqrt(1.0 + a * a);
    r.delta(i) = a / (kappa * root);
    r.omega2(i) = p.factor.D(i) * (1.0 + a * a);
  }
  return r;
}

/// alpha_i = delta_i omega_i and kappa_i^2 = omega_i^2 / (1 + alpha_i^2).
inline SgdgParams reparam_inverse(const ReparamParams& r, const Graph& g) {
  const int k = static_cast<int>(r.mu.size());
  if (r.delta.size() != k || r.omega2.size() != k || r.L.rows() != k ||
      r.L.cols() != k || g.size() != k)
    throw DimensionMismatch("reparametrised lengths differ");
  SgdgParams p{r.mu, CholFactor{r.L, Vector(k)}, Vector(k), g};
  for (int i = 0; i < k; ++i) {
    if (!(r.omega2(i) > 0.0))
      throw InvalidDomain("omega^2 must be positive");
    const double a = r.delta(i) * std::sqrt(r.omega2(i));
    p.alpha(i) = a;
    p.factor.D(i) = r.omega2(i) / (1.0 + a * a);
  }
  return p;
}

/// X = mu + L^-1 D_k^{-1/2} [ D_a (I + D_a^2)^{-1/2} U + (I + D_a^2)^{-1/2} V ]
/// with U half-normal and V standard normal. Draws are rows.
inline Matrix sample_sgdg(const SgdgParams& p, Rng& rng, int n_draws) {
  const int k = p.dim();
  Vector skew(k), noise(k);
  for (int i = 0; i < k; ++i) {
    const double a = p.alpha(i);
    const double scale = 1.0 / std::sqrt(p.factor.D(i) * (1.0 + a * a));
    skew(i) = a * scale;
    noise(i) = scale;
  }
  Matrix draws(n_draws, k);
  Vector e(k);
  for (int s = 0; s < n_draws; ++s) {
    for (int i = 0; i < k; ++i) {
      const double u = sample_half_normal(rng);
      e(i) = skew(i) * u + noise(i) * rng.normal();
    }
    draws.row(s) = (p.mu + solve_unit_triangular(p.factor, e)).transpose();
  }
  return draws;
}

/// Hierarchical form: X = mu + L^-1 (D_delta U + D_omega^{-1/2} V).
inline Matrix sample_sgdg(const ReparamParams& r, Rng& rng, int n_draws,
                          Matrix* latent_u = nullptr) {
  const int k = static_cast<int>(r.mu.size());
  const CholFactor f{r.L, r.omega2};
  Matrix draws(n_draws, k);
  if (latent_u) latent_u->resize(n_draws, k);
  Vector e(k);
  for (int s = 0; s < n_draws; ++s) {
    for (int i = 0; i < k; ++i) {
      const double u = sample_half_normal(rng);
      if (latent_u) (*latent_u)(s, i) = u;
      e(i) = r.delta(i) * u + rng.normal() / std::sqrt(r.omega2(i));
    }
    draws.row(s) = (r.mu + solve_unit_triangular(f, e)).transpose();
  }
  return draws;
}

namespace detail {
// d_i = sqrt(2/pi) alpha_i / sqrt(1 + alpha_i^2), the mean of each latent
// half-normal contribution.
inline Vector skew_offsets(const SgdgParams& p) {
  Vector d(p.dim());
  for (int i = 0; i < p.dim(); ++i)
    d(i) = std::sqrt(2.0 / std::numbers::pi) * p.alpha(i) /
           std::sqrt(1.0 + p.alpha(i) * p.alpha(i));
  return d;
}
}  // namespace detail

/// E(X) = mu + L^-1 D_k^{-1/2} d.
inline Vector mean_vector(const SgdgParams& p) {
  const Vector d = detail::skew_offsets(p);
  return p.mu +
         solve_unit_triangular(p.factor, p.factor.D.cwiseSqrt().cwiseInverse()
                                             .cwiseProduct(d));
}

/// Cov(X) = L^-1 D_k^{-1/2} (I - D^2) D_k^{-1/2} L^-T, the law of the
/// stochastic representation; its inverse keeps the zero pattern of Q.
inline Matrix covariance_matrix(const SgdgParams& p) {
  const Vector d = detail::skew_offsets(p);
  const Vector inner =
      (Vector::Ones(p.dim()) - d.cwiseAbs2()).cwiseQuotient(p.factor.D);
  const Matrix linv = unit_triangular_inverse(p.factor);
  Matrix c = linv * inner.asDiagonal() * linv.transpose();
  return 0.5 * (c + c.transpose());
}

/// Inverse covariance assembled directly from its factor,
/// L' D_k^{1/2} (I - D^2)^{-1} D_k^{1/2} L, with no matrix inversion.
inline Matrix inverse_covariance_matrix(const SgdgParams& p) {
  const Vector d = detail::skew_offsets(p);
  const Vector inner =
      p.factor.D.cwiseQuotient(Vector::Ones(p.dim()) - d.cwiseAbs2());
  return p.factor.L.transpose() * inner.asDiagonal() * p.factor.L;
}

/// Marginal density of X_j on `grid`, Rao-Blackwellised over n_mc draws.
/// X_j = mu_j + e_j + sum_{r>j} (L^-1)_jr e_r with independent skew-normal
/// e_r of scale 1/kappa_r and shape alpha_r, so conditioning on the e_r with
/// r != j leaves the closed-form density of e_j.
inline std::vector<double> marginal_density(const SgdgParams& p, int j,
                                            const std::vector<double>& grid,
                                            Rng& rng, int n_mc) {
  const int k = p.dim();
  if (j < 0 || j >= k) throw InvalidParams("variable index out of range");
  if (n_mc < 1) throw InvalidParams("need at least one Monte Carlo draw");
  const Matrix c = unit_triangular_inverse(p.factor);
  auto draw_e = [&](int r) {
    const double a = p.alpha(r);
    const double root = std::sqrt(1.0 + a * a);
    return (a / root * sample_half_normal(rng) + rng.normal() / root) /
           std::sqrt(p.factor.D(r));
  };
  std::vector<double> dens(grid.size(), 0.0);
  const double kappa = std::sqrt(p.factor.D(j));
  const double a = p.alpha(j);
  for (int s = 0; s < n_mc; ++s) {
    double shift = p.mu(j);
    for (int r = j + 1; r < k; ++r)
      if (c(j, r) != 0.0) shift += c(j, r) * draw_e(r);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double z = kappa * (grid[g] - shift);
      dens[g] += 2.0 * kappa * std::exp(norm_logpdf(z) + norm_logcdf(a * z));
    }
  }
  for (double& d : dens) d /= n_mc;
  return dens;
}

struct FactorizationOptions {
  int nodes_per_axis = 200;
  double half_width_sds = 8.0;
  double tolerance = 1e-6;
};

/// Ratio of the second to the first singular value of the conditional
/// density grid of (x_i, x_j) given the remaining coordinates, maximised over
/// a few conditioning points. Zero (to rounding) iff the grid is rank one.
inline double factorization_defect(const SgdgParams& p, int i, int j,
                                   const FactorizationOptions& opt = {}) {
  const int k = p.dim();
  if (k > 4) throw DimensionTooLarge("factorisation check supports k <= 4");
  if (!(0 <= i && i < j && j < k)) throw InvalidParams("need 0 <= i < j < k");

  const Vector mean = mean_vector(p);
  const Vector sd = covariance_matrix(p).diagonal().cwiseSqrt();
  const GaussLegendre gi(opt.nodes_per_axis, mean(i) - opt.half_width_sds * sd(i),
                         mean(i) + opt.half_width_sds * sd(i));
  const GaussLegendre gj(opt.nodes_per_axis, mean(j) - opt.half_width_sds * sd(j),
                         mean(j) + opt.half_width_sds * sd(j));

  std::vector<double> shifts = {0.0};
  if (k > 2) shifts = {-1.0, 0.0, 1.0};

  const int n = opt.nodes_per_axis;
  double worst = 0.0;
  for (double shift : shifts) {
    Vector x = mean + shift * sd;
    Matrix logf(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        x(i) = gi.nodes[a];
        x(j) = gj.nodes[b];
        logf(a, b) = sgdg_log_density(p, x);
      }
    const Matrix f = (logf.array() - logf.maxCoeff()).exp().matrix();
    Eigen::JacobiSVD<Matrix> svd(f);
    const auto& sv = svd.singularValues();
    worst = std::max(worst, sv(1) / sv(0));
  }
  return worst;
}

/// Empirical check that X_i and X_j are conditionally independent given the
/// rest: the conditional density grid factorises (is rank one).
inline bool ci_factorization_check(const SgdgParams& p, int i, int j,
                                   const FactorizationOptions& opt = {}) {
  return factorization_defect(p, i, j, opt) < opt.tolerance;
}

}  // namespace sgdg
