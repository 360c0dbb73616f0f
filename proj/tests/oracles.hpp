#pragma once

// Reference computations used only by the tests. Each takes a route independent of the
// library code it checks.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "feti_lab/feti_lab.hpp"

namespace feti_lab::oracle {

/// Five-point Laplacian over all (N m + 1)² grid nodes, natural (Neumann) rows on the boundary
/// built from edge weights: every grid edge of length h carries weight 1 except edges on ∂Ω,
/// which border one cell and carry 1/2.
inline Matrix five_point_neumann(int cells) {
  const int p = cells + 1;
  const int n = p * p;
  Matrix a = Matrix::Zero(n, n);
  const auto id = [p](int i, int j) { return j * p + i; };
  const auto edge = [&](int u, int v, double w) {
    a(u, u) += w;
    a(v, v) += w;
    a(u, v) -= w;
    a(v, u) -= w;
  };
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) {
      if (i + 1 < p) edge(id(i, j), id(i + 1, j), (j == 0 || j == cells) ? 0.5 : 1.0);
      if (j + 1 < p) edge(id(i, j), id(i, j + 1), (i == 0 || i == cells) ? 0.5 : 1.0);
    }
  }
  return a;
}

/// S by explicit dense inversion of A_rr.
inline Matrix dense_schur(const BlockStiffness& b) {
  const Matrix rr = Matrix(b.rr), rd = Matrix(b.rd), dd = Matrix(b.dd);
  if (rr.rows() == 0) return dd;
  return dd - rd.transpose() * rr.inverse() * rd;
}

/// F by explicit dense inversion of S.
inline Matrix dense_dual(const BlockStiffness& b, const JumpOperator& jump) {
  const Matrix bm = Matrix(jump.matrix);
  return bm * dense_schur(b).inverse() * bm.transpose();
}

inline Vector dense_eigenvalues(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly).eigenvalues();
}

/// Largest eigenvalue of pinv(K) Q through a general (non-symmetric) eigensolver; valid because
/// K and Q share the constant kernel.
inline double poincare_pinv_route(const PoincarePencil& pencil) {
  const Matrix kp = pencil.stiffness.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::EigenSolver<Matrix> es(kp * pencil.trace, false);
  double best = -1.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()(i).real());
  return best;
}

inline double gamma_sq_closed_form(int n) { return corner_energy_closed_form(n) / remainder_energy_closed_form(n); }

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> dist;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace feti_lab::oracle
