#pragma once

// Test-side generators and independent oracles. Nothing here calls into the
// library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sgdg/graph.hpp"
#include "sgdg/linalg.hpp"
#include "sgdg/rng.hpp"
#include "sgdg/sgdg.hpp"

namespace sgdg::test {

/// Chordal graph grown by attaching each new vertex to a random clique of the
/// earlier ones, then shuffled. Labels are NOT in elimination order.
inline Graph random_decomposable(int k, Rng& rng, double attach = 0.6) {
  std::vector<std::vector<int>> adj(k);
  Graph g(k);
  for (int v = 1; v < k; ++v) {
    // Seed with one random earlier vertex, then grow a clique among its
    // neighbours with probability `attach` per candidate.
    std::vector<int> clique;
    if (rng.uniform() < 0.9) {
      const int u = static_cast<int>(rng.uniform() * v) % v;
      clique.push_back(u);
      std::vector<int> cand = adj[u];
      std::shuffle(cand.begin(), cand.end(), rng.engine());
      for (int c : cand) {
        bool ok = rng.uniform() < attach;
        for (int m : clique) ok = ok && g.adjacent(c, m);
        if (ok) clique.push_back(c);
      }
    }
    for (int c : clique) {
      g.add_edge(v, c);
      adj[v].push_back(c);
      adj[c].push_back(v);
    }
  }
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  Graph out(k);
  for (auto [i, j] : g.edges()) out.add_edge(perm[i], perm[j]);
  return out;
}

/// Random decomposable graph whose labels already form an elimination order.
inline Graph random_ordered_decomposable(int k, Rng& rng, double attach = 0.6) {
  const Graph g = random_decomposable(k, rng, attach);
  return relabel(g, perfect_elimination_ordering(g));
}

/// Erdos-Renyi graph.
inline Graph random_graph(int k, double p, Rng& rng) {
  Graph g(k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (rng.uniform() < p) g.add_edge(i, j);
  return g;
}

/// Brute-force chordality: a graph is chordal iff no vertex subset of size
/// >= 4 induces a cycle (connected, every induced degree exactly 2).
inline bool has_chordless_cycle(const Graph& g) {
  const int k = g.size();
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < 4) continue;
    bool all_two = true;
    int first = -1;
    for (int v = 0; v < k && all_two; ++v) {
      if (!(mask >> v & 1u)) continue;
      if (first < 0) first = v;
      int deg = 0;
      for (int w = 0; w < k; ++w)
        if ((mask >> w & 1u) && g.adjacent(v, w)) ++deg;
      all_two = deg == 2;
    }
    if (!all_two) continue;
    // connected?
    unsigned seen = 1u << first, frontier = seen;
    while (frontier) {
      unsigned next = 0;
      for (int v = 0; v < k; ++v)
        if (frontier >> v & 1u)
          for (int w = 0; w < k; ++w)
            if ((mask >> w & 1u) && !(seen >> w & 1u) && g.adjacent(v, w))
              next |= 1u << w;
      seen |= next;
      frontier = next;
    }
    if (seen == mask) return true;
  }
  return false;
}

/// Definition of a perfect elimination order checked vertex by vertex: the
/// later neighbours of every vertex are pairwise adjacent.
inline bool later_neighbours_are_cliques(const Graph& g,
                                         const std::vector<int>& perm) {
  const int k = g.size();
  std::vector<int> pos(k);
  for (int p = 0; p < k; ++p) pos[perm[p]] = p;
  for (int v = 0; v < k; ++v) {
    std::vector<int> later;
    for (int w = 0; w < k; ++w)
      if (g.adjacent(v, w) && pos[w] > pos[v]) later.push_back(w);
    for (std::size_t a = 0; a < later.size(); ++a)
      for (std::size_t b = a + 1; b < later.size(); ++b)
        if (!g.adjacent(later[a], later[b])) return false;
  }
  return true;
}

/// Random unit upper factor with the graph's pattern and D in [0.5, 2].
inline CholFactor random_factor(const Graph& g, Rng& rng, double scale = 1.0) {
  const int k = g.size();
  CholFactor f = CholFactor::identity(k);
  for (int i = 0; i < k; ++i) {
    f.D(i) = 0.5 + 1.5 * rng.uniform();
    for (int j = i + 1; j < k; ++j)
      if (g.adjacent(i, j)) {
        double v = scale * rng.normal();
        if (std::abs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;  // keep edges generic
        f.L(i, j) = v;
      }
  }
  return f;
}

/// Dense oracle for Q = U' D U (U unit upper) from Eigen's plain Cholesky
/// Q = C C' (C lower): U = (C diag(C)^-1)', D = diag(C)^2.
inline CholFactor dense_ud_factor(const Matrix& q) {
  Eigen::LLT<Matrix> llt(q);
  const Matrix c = llt.matrixL();
  const Vector diag = c.diagonal();
  CholFactor f;
  f.D = diag.cwiseAbs2();
  f.L = (c * diag.cwiseInverse().asDiagonal()).transpose();
  return f;
}

/// Multivariate normal log density via an explicit inverse and determinant.
inline double mvn_logpdf_oracle(const Vector& x, const Vector& mu,
                                const Matrix& precision) {
  const double k = static_cast<double>(x.size());
  const Vector d = x - mu;
  return 0.5 * std::log(precision.determinant()) - 0.5 * d.dot(precision * d) -
         0.5 * k * std::log(2.0 * M_PI);
}

/// Generic SGDG parameters on an ordered graph.
inline SgdgParams random_sgdg(const Graph& g, Rng& rng, double alpha_scale = 2.0) {
  const int k = g.size();
  SgdgParams p{Vector(k), random_factor(g, rng, 0.7), Vector(k), g};
  for (int i = 0; i < k; ++i) {
    p.mu(i) = rng.normal();
    p.alpha(i) = alpha_scale * rng.normal();
  }
  return p;
}

/// Standard normal cdf through std::erfc, independent of normal.hpp.
inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Sample skewness.
inline double skewness(const Vector& x) {
  const double m = x.mean();
  const double m2 = (x.array() - m).square().mean();
  const double m3 = (x.array() - m).cube().mean();
  return m3 / std::pow(m2, 1.5);
}

/// Kolmogorov distance between a sample and a cdf.
template <class Cdf>
double ks_distance(std::vector<double> x, Cdf&& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

}  // namespace sgdg::test
