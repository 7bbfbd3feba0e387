#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace sgdg {

/// Gauss-Legendre nodes and weights on [a, b].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  GaussLegendre(int n, double a, double b) : nodes(n), weights(n) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      // Newton iteration on P_n from the Tricomi initial guess.
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[i] = mid - half * x;
      nodes[n - 1 - i] = mid + half * x;
      weights[i] = weights[n - 1 - i] = half * w;
    }
  }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// Composite rule: `panels` equal sub-intervals, `order` nodes each.
inline GaussLegendre composite_gauss_legendre(int panels, int order, double a,
                                              double b) {
  GaussLegendre out(0, 0.0, 1.0);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    GaussLegendre piece(order, a + p * h, a + (p + 1) * h);
    out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    out.weights.insert(out.weights.end(), piece.weights.begin(),
                       piece.weights.end());
  }
  return out;
}

}  // namespace sgdg
