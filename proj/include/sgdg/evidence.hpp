#pragma once

// Marginal likelihood from posterior log-likelihood draws with the modified
// harmonic mean estimator p4 of Newton & Raftery (1994), and Bayes factors.
//
// p4 treats the sample as drawn from the mixture d * prior + (1 - d) *
// posterior, with the prior part replaced by m = d S / (1 - d) imaginary
// draws whose likelihood equals the current estimate p:
//
//   p <- [ m + sum_s l_s / (d p + (1-d) l_s) ] / [ m / p + sum_s 1 / (d p + (1-d) l_s) ]
//
// Everything is evaluated in log space.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "sgdg/error.hpp"
#include "sgdg/inference.hpp"

namespace sgdg {

struct EvidenceEstimate {
  double log_marginal = 0.0;
  int n_draws_used = 0;
  double mix_weight = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct EvidenceOptions {
  double mix_weight = 0.01;
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

namespace detail {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline double log_sum_exp(const std::vector<double>& v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

}  // namespace detail

/// Fixed-point iteration; returns the estimate with `converged` set. Use
/// estimate_log_marginal for the throwing variant.
inline EvidenceEstimate iterate_log_marginal(std::span<const double> loglik,
                                             const EvidenceOptions& opt = {}) {
  if (loglik.empty()) throw EmptyTrace("no log-likelihood values");
  const double d = opt.mix_weight;
  if (!(d > 0.0 && d < 1.0)) throw InvalidParams("mix_weight must lie in (0,1)");
  for (double l : loglik)
    if (!std::isfinite(l)) throw NumericalFailure("non-finite log-likelihood");

  const auto n = loglik.size();
  const double log_d = std::log(d);
  const double log_1md = std::log1p(-d);
  const double log_m = std::log(d * static_cast<double>(n) / (1.0 - d));

  EvidenceEstimate est;
  est.n_draws_used = static_cast<int>(n);
  est.mix_weight = d;
  double p = *std::max_element(loglik.begin(), loglik.end());
  std::vector<double> num(n + 1), den(n + 1);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    for (std::size_t s = 0; s < n; ++s) {
      const double mix = detail::log_add(log_d + p, log_1md + loglik[s]);
      num[s] = loglik[s] - mix;
      den[s] = -mix;
    }
    num[n] = log_m;
    den[n] = log_m - p;
    const double next = detail::log_sum_exp(num) - detail::log_sum_exp(den);
    if (!std::isfinite(next)) break;
    const double change = std::abs(next - p);
    p = next;
    est.iterations = it;
    if (change < opt.tolerance) {
      est.converged = true;
      break;
    }
  }
  est.log_marginal = p;
  return est;
}

inline EvidenceEstimate estimate_log_marginal(std::span<const double> loglik,
                                              const EvidenceOptions& opt = {}) {
  auto est = iterate_log_marginal(loglik, opt);
  if (!est.converged)
    throw NotConverged("p4 fixed point did not converge in " +
                       std::to_string(opt.max_iterations) + " iterations");
  return est;
}

/// log of the plain harmonic mean estimator, 1 / mean(1 / l_s).
inline double harmonic_mean_log_marginal(std::span<const double> loglik) {
  std::vector<double> neg(loglik.begin(), loglik.end());
  for (double& v : neg) v = -v;
  return std::log(static_cast<double>(neg.size())) - detail::log_sum_exp(neg);
}

struct BayesFactor {
  double log_bf = 0.0;
  EvidenceEstimate numerator;
  EvidenceEstimate denominator;
};

/// log BF = log m(A) - log m(B); both traces must come from the same data.
inline BayesFactor bayes_factor(const Trace& a, const Trace& b,
                                const EvidenceOptions& opt = {}) {
  if (a.meta.n != b.meta.n ||
      a.meta.data_fingerprint != b.meta.data_fingerprint)
    throw DimensionMismatch("traces were not fitted to identical data");
  BayesFactor bf;
  bf.numerator = estimate_log_marginal(a.loglik, opt);
  bf.denominator = estimate_log_marginal(b.loglik, opt);
  bf.log_bf = bf.numerator.log_marginal - bf.denominator.log_marginal;
  return bf;
}

}  // namespace sgdg
