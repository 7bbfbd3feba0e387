#pragma once

// Closed skew-normal family CSN_{n,m}(mu, Sigma, Gamma, nu, Delta).
//
//   f(y) = phi_n(y; mu, Sigma) Phi_m(Gamma (y - mu); nu, Delta)
//          / Phi_m(0; nu, Delta + Gamma Sigma Gamma')
//
// Only the diagonal case of the two Phi_m terms is supported: both then
// factor into products of univariate normal cdfs. Non-diagonal inputs are
// rejected instead of approximated.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "sgdg/error.hpp"
#include "sgdg/linalg.hpp"
#include "sgdg/normal.hpp"
#include "sgdg/rng.hpp"

namespace sgdg {

struct CsnParams {
  Vector mu;     // n
  Matrix sigma;  // n x n, SPD
  Matrix gamma;  // m x n
  Vector nu;     // m
  Matrix delta;  // m x m, SPD

  int dim() const { return static_cast<int>(mu.size()); }
  int latent_dim() const { return static_cast<int>(nu.size()); }

  void validate() const {
    const auto n = mu.size();
    const auto m = nu.size();
    if (sigma.rows() != n || sigma.cols() != n || gamma.rows() != m ||
        gamma.cols() != n || delta.rows() != m || delta.cols() != m)
      throw DimensionMismatch("CSN parameter dimensions are inconsistent");
    if (!is_symmetric(sigma, 1e-10) || sigma.llt().info() != Eigen::Success)
      throw NotPositiveDefinite("CSN scale matrix is not SPD");
    if (!is_symmetric(delta, 1e-10) || delta.llt().info() != Eigen::Success)
      throw NotPositiveDefinite("CSN latent scale matrix is not SPD");
  }

  /// Delta + Gamma Sigma Gamma', the covariance of the latent truncation.
  Matrix latent_covariance() const {
    return delta + gamma * sigma * gamma.transpose();
  }
};

namespace detail {

inline bool is_diagonal(const Matrix& a, double rel_tol = 1e-9) {
  const double scale = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j && std::abs(a(i, j)) > rel_tol * scale) return false;
  return true;
}

inline double mvn_logpdf(const Vector& y, const Vector& mu,
                         const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("covariance is not SPD");
  const Vector z = llt.matrixL().solve(y - mu);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * z.squaredNorm() - 0.5 * log_det -
         static_cast<double>(y.size()) * kLogSqrt2Pi;
}

// Sum_i log Phi((z_i - nu_i) / sqrt(cov_ii)) for diagonal cov.
inline double diagonal_log_cdf(const Vector& z, const Vector& nu,
                               const Matrix& cov) {
  double s = 0.0;
  for (int i = 0; i < z.size(); ++i)
    s += norm_logcdf((z(i) - nu(i)) / std::sqrt(cov(i, i)));
  return s;
}

}  // namespace detail

/// log phi_n(y) + log Phi_m(Gamma(y-mu); nu, Delta): the density without
/// the Phi_m normaliser. Requires only a diagonal Delta.
inline double csn_log_kernel(const CsnParams& p, const Vector& y) {
  p.validate();
  if (y.size() != p.dim()) throw DimensionMismatch("point has wrong length");
  if (!detail::is_diagonal(p.delta))
    throw UnsupportedCovarianceStructure("Delta must be diagonal");
  const Vector centred = y - p.mu;
  return detail::mvn_logpdf(y, p.mu, p.sigma) +
         detail::diagonal_log_cdf(p.gamma * centred, p.nu, p.delta);
}

inline double csn_log_density(const CsnParams& p, const Vector& y) {
  const double kernel = csn_log_kernel(p, y);
  const Matrix latent = p.latent_covariance();
  if (!detail::is_diagonal(latent))
    throw UnsupportedCovarianceStructure(
        "Delta + Gamma Sigma Gamma' must be diagonal");
  return kernel -
         detail::diagonal_log_cdf(Vector::Zero(p.latent_dim()), p.nu, latent);
}

/// Distribution of the trailing block y2 given the leading `split`
/// coordinates equal y1.
inline CsnParams csn_conditional(const CsnParams& p, int split,
                                 const Vector& y1) {
  p.validate();
  const int n = p.dim();
  if (split <= 0 || split >= n)
    throw InvalidParams("split must leave both blocks nonempty");
  if (y1.size() != split) throw DimensionMismatch("observed block length");
  const int r = n - split;
  const Matrix s11 = p.sigma.topLeftCorner(split, split);
  const Matrix s21 = p.sigma.bottomLeftCorner(r, split);
  const Matrix s22 = p.sigma.bottomRightCorner(r, r);
  Eigen::LLT<Matrix> llt(s11);
  if (llt.info() != Eigen::Success)
    throw SingularBlock("Sigma_11 is not invertible");
  // B = Sigma_21 Sigma_11^{-1}
  const Matrix b = llt.solve(s21.transpose()).transpose();
  const Vector shift = y1 - p.mu.head(split);
  const Matrix g1 = p.gamma.leftCols(split);
  const Matrix g2 = p.gamma.rightCols(r);
  const Matrix g_star = g1 + g2 * b;

  CsnParams out;
  out.mu = p.mu.tail(r) + b * shift;
  out.sigma = s22 - b * s21.transpose();
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose());
  out.gamma = g2;
  out.nu = p.nu - g_star * shift;
  out.delta = p.delta;
  return out;
}

/// Latent-variable representation
///   Y = mu + (Sigma^-1 + Gamma' Delta^-1 Gamma)^{-1/2} V
///          + Sigma Gamma' (Delta + Gamma Sigma Gamma')^-1 U
/// with V ~ N(0, I) and U ~ N(0, Delta + Gamma Sigma Gamma') truncated below
/// at nu (nu = 0 is the usual textbook case). Returns draws as rows.
inline Matrix sample_csn(const CsnParams& p, Rng& rng, int n_draws) {
  p.validate();
  const int n = p.dim();
  const int m = p.latent_dim();
  const Matrix latent = p.latent_covariance();
  if (!detail::is_diagonal(latent))
    throw UnsupportedCovarianceStructure(
        "Delta + Gamma Sigma Gamma' must be diagonal for exact sampling");

  // Any square root works because V is isotropic: with P = R R' (Cholesky of
  // the precision), R'^{-1} V has covariance P^{-1}.
  const Matrix precision =
      p.sigma.inverse() + p.gamma.transpose() * p.delta.inverse() * p.gamma;
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("conditional precision is not SPD");
  const Matrix loading =
      p.sigma * p.gamma.transpose() * latent.diagonal().cwiseInverse().asDiagonal();

  Matrix draws(n_draws, n);
  Vector v(n), u(m);
  for (int s = 0; s < n_draws; ++s) {
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    for (int i = 0; i < m; ++i)
      u(i) = sample_truncated_normal(0.0, latent(i, i), p.nu(i), rng);
    const Vector root_part = llt.matrixU().solve(v);
    draws.row(s) = (p.mu + root_part + loading * u).transpose();
  }
  return draws;
}

}  // namespace sgdg
