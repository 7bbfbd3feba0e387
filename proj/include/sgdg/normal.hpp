#pragma once

// Univariate normal building blocks: pdf, cdf, log-cdf with a tail
// expansion, quantile, and exact truncated / half-normal samplers.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "sgdg/rng.hpp"

namespace sgdg {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

inline double norm_logpdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

inline double norm_pdf(double x) { return std::exp(norm_logpdf(x)); }

inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// log Phi(x). Below -8 the Mills-ratio asymptotic series is summed until its
/// terms stop shrinking.
inline double norm_logcdf(double x) {
  if (x >= -8.0) return std::log(norm_cdf(x));
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 60; ++n) {
    const double next = -term * (2 * n - 1) * inv_x2;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return norm_logpdf(x) - std::log(-x) + std::log(sum);
}

inline double norm_quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace detail {

// Standard normal restricted to [a, inf), a > 0, via the exponential
// proposal of Robert (1995) with the optimal rate.
inline double standard_tail_normal(double a, Rng& rng) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng.uniform()) / rate;
    const double d = z - rate;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
  }
}

}  // namespace detail

inline constexpr double kTailSwitch = 4.0;

/// Exact draw from N(mu, var) restricted to [lower, inf).
inline double sample_truncated_normal(double mu, double var, double lower,
                                      Rng& rng) {
  const double sd = std::sqrt(var);
  const double a = (lower - mu) / sd;
  double z;
  if (a > kTailSwitch) {
    z = detail::standard_tail_normal(a, rng);
  } else if (a == -std::numeric_limits<double>::infinity()) {
    z = rng.normal();
  } else {
    // Inverting the upper-tail mass keeps precision when Phi(a) is near one.
    z = -norm_quantile(rng.uniform() * norm_cdf(-a));
    if (z < a) z = a;
  }
  return mu + sd * z;
}

inline double sample_half_normal(Rng& rng) { return std::abs(rng.normal()); }

/// E[Z | Z >= a] for a standard normal Z.
inline double truncated_normal_mean(double a) {
  return std::exp(norm_logpdf(a) - norm_logcdf(-a));
}

}  // namespace sgdg
