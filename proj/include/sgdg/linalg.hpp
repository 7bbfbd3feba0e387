#pragma once

// Modified Cholesky factorisation Q = L' D L with L unit upper triangular,
// and the pattern bookkeeping that ties L to a decomposable graph.

#include <cmath>

#include <Eigen/Dense>

#include "sgdg/error.hpp"
#include "sgdg/graph.hpp"

namespace sgdg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kPatternZero = 1e-12;

/// (L, D): L unit upper triangular, D strictly positive.
struct CholFactor {
  Matrix L;
  Vector D;

  static CholFactor identity(int k) {
    return {Matrix::Identity(k, k), Vector::Ones(k)};
  }

  int size() const { return static_cast<int>(D.size()); }

  bool valid() const {
    const int k = size();
    if (L.rows() != k || L.cols() != k) return false;
    for (int i = 0; i < k; ++i) {
      if (L(i, i) != 1.0 || !(D(i) > 0.0)) return false;
      for (int j = 0; j < i; ++j)
        if (L(i, j) != 0.0) return false;
    }
    return true;
  }
};

inline bool is_symmetric(const Matrix& q, double rel_tol = 1e-12) {
  if (q.rows() != q.cols()) return false;
  const double scale = std::max(q.cwiseAbs().maxCoeff(), 1e-300);
  return (q - q.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

/// Q_ij == 0 for every non-edge (membership in P_G).
inline bool in_graph_pattern(const Matrix& q, const Graph& g,
                             double tol = kPatternZero) {
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      if (i != j && !g.adjacent(i, j) && std::abs(q(i, j)) > tol) return false;
  return true;
}

inline CholFactor modified_cholesky(const Matrix& q) {
  const int k = static_cast<int>(q.rows());
  if (q.cols() != k) throw DimensionMismatch("precision matrix must be square");
  CholFactor f{Matrix::Identity(k, k), Vector::Zero(k)};
  for (int i = 0; i < k; ++i) {
    double pivot = q(i, i);
    for (int r = 0; r < i; ++r) pivot -= f.L(r, i) * f.L(r, i) * f.D(r);
    if (!(pivot > 0.0))
      throw NotPositiveDefinite("non-positive pivot at row " +
                                std::to_string(i + 1));
    f.D(i) = pivot;
    for (int j = i + 1; j < k; ++j) {
      double s = q(i, j);
      for (int r = 0; r < i; ++r) s -= f.L(r, i) * f.D(r) * f.L(r, j);
      f.L(i, j) = s / pivot;
    }
  }
  return f;
}

/// L' diag(D) L.
inline Matrix assemble_precision(const CholFactor& f) {
  return f.L.transpose() * f.D.asDiagonal() * f.L;
}

/// Nonzero pattern of the strict upper triangle of L equals the edge set.
inline bool verify_pattern(const CholFactor& f, const Graph& g,
                           double tol = kPatternZero) {
  const int k = g.size();
  if (f.size() != k) return false;
  for (int i = 0; i < k; ++i) {
    if (f.L(i, i) != 1.0) return false;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const bool nonzero = std::abs(f.L(i, j)) > tol;
      if (j < i && nonzero) return false;
      if (j > i && nonzero != g.adjacent(i, j)) return false;
    }
  }
  return true;
}

/// Solves L x = b by back substitution, skipping structural zeros.
inline Vector solve_unit_triangular(const CholFactor& f, const Vector& b) {
  const int k = f.size();
  if (b.size() != k) throw DimensionMismatch("rhs length differs from factor");
  Vector x = b;
  for (int i = k - 1; i >= 0; --i) {
    double s = x(i);
    for (int j = i + 1; j < k; ++j)
      if (f.L(i, j) != 0.0) s -= f.L(i, j) * x(j);
    x(i) = s;
  }
  return x;
}

/// Solves L' x = b by forward substitution.
inline Vector solve_unit_triangular_transpose(const CholFactor& f,
                                              const Vector& b) {
  const int k = f.size();
  if (b.size() != k) throw DimensionMismatch("rhs length differs from factor");
  Vector x = b;
  for (int j = 0; j < k; ++j) {
    double s = x(j);
    for (int i = 0; i < j; ++i)
      if (f.L(i, j) != 0.0) s -= f.L(i, j) * x(i);
    x(j) = s;
  }
  return x;
}

/// Dense inverse of the unit upper factor.
inline Matrix unit_triangular_inverse(const CholFactor& f) {
  const int k = f.size();
  Matrix inv(k, k);
  for (int c = 0; c < k; ++c) inv.col(c) = solve_unit_triangular(f, Vector::Unit(k, c));
  return inv;
}

inline double log_det_precision(const CholFactor& f) {
  return f.D.array().log().sum();
}

}  // namespace sgdg
